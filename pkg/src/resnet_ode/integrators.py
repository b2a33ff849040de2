"""Explicit one-step schemes used to build training targets and reference states.

All steppers accept a single state ``(n,)`` or a batch ``(J, n)``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .systems import OdeSystem


class NonFiniteStateError(ArithmeticError):
    """Raised when an integration step produces inf or nan."""

    def __init__(self, message, index=None):
        super().__init__(message)
        self.index = index


@dataclass(frozen=True)
class StepScheme:
    kind: str
    formal_order: int

    @property
    def target_order(self) -> int:
        # one step of size dt only, so the local error is one order higher
        return self.formal_order + 1


SCHEMES = {
    "euler": StepScheme("euler", 1),
    "rk2": StepScheme("rk2", 2),
    "rk4": StepScheme("rk4_38", 4),
}
SCHEMES["rk4_38"] = SCHEMES["rk4"]


def get_scheme(name: str | StepScheme) -> StepScheme:
    if isinstance(name, StepScheme):
        return name
    try:
        return SCHEMES[name]
    except KeyError:
        raise ValueError(f"unknown scheme {name!r}; expected euler, rk2 or rk4") from None


def _check_dt(dt):
    if not dt > 0:
        raise ValueError("dt must be positive")


def _finite(y):
    if not np.all(np.isfinite(y)):
        bad = None
        if y.ndim > 1:
            bad = int(np.flatnonzero(~np.all(np.isfinite(y), axis=-1))[0])
        raise NonFiniteStateError("integration produced a non-finite state", index=bad)
    return y


def euler_step(system: OdeSystem, x, t, dt):
    _check_dt(dt)
    x = np.asarray(x, dtype=float)
    return _finite(x + dt * system.rhs(x, t))


def rk2_step(system: OdeSystem, x, t, dt):
    """Heun's method: trapezoidal average of the slopes at both ends."""
    _check_dt(dt)
    x = np.asarray(x, dtype=float)
    F = system.rhs
    k1 = F(x, t)
    k2 = F(x + dt * k1, t + dt)
    return _finite(x + dt * (k1 + k2) / 2)


def _rk4_38(F, x, t, dt):
    k1 = F(x, t)
    k2 = F(x + (dt / 3) * k1, t + dt / 3)
    k3 = F(x - (dt / 3) * k1 + dt * k2, t + 2 * dt / 3)
    k4 = F(x + dt * k1 - dt * k2 + dt * k3, t + dt)
    return x + (dt / 8) * (k1 + 3 * k2 + 3 * k3 + k4)


def rk4_38_step(system: OdeSystem, x, t, dt):
    """Four-stage Runge-Kutta with nodes 0, 1/3, 2/3, 1 and weights (1, 3, 3, 1)/8."""
    _check_dt(dt)
    return _finite(_rk4_38(system.rhs, np.asarray(x, dtype=float), t, dt))


def reference_step(system: OdeSystem, x, t, dt, substeps: int = 1000):
    """Advance by dt with ``substeps`` rk4_38 steps of size dt/substeps."""
    _check_dt(dt)
    if substeps < 1:
        raise ValueError("substeps must be at least 1")
    F = system.rhs
    h = dt / substeps
    y = np.asarray(x, dtype=float)
    for i in range(substeps):
        y = _rk4_38(F, y, t + i * h, h)
    return _finite(y)


STEPPERS = {
    "euler": euler_step,
    "rk2": rk2_step,
    "rk4_38": rk4_38_step,
}


def step(scheme, system: OdeSystem, x, t, dt):
    return STEPPERS[get_scheme(scheme).kind](system, x, t, dt)
