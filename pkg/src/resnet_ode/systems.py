"""Benchmark ODE systems and the transformations that put them in standard form.

Every right-hand side works on the last axis of its state argument, so a
single call can evaluate one state of shape ``(n,)`` or a batch of shape
``(J, n)``.  The time argument is a scalar or broadcasts against the batch.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Callable

import numpy as np

Rhs = Callable[[np.ndarray, "float | np.ndarray"], np.ndarray]


@dataclass(frozen=True)
class Domain:
    """Region that initial states are drawn from: an axis-aligned box or a 2-D disk."""

    kind: str
    bounds: np.ndarray | None = None  # (n, 2) for boxes
    center: np.ndarray | None = None
    radius: float | None = None

    def __post_init__(self):
        if self.kind == "box":
            b = np.asarray(self.bounds, dtype=float)
            if b.ndim != 2 or b.shape[1] != 2:
                raise ValueError("box bounds must have shape (n, 2)")
            if np.any(b[:, 0] > b[:, 1]):
                raise ValueError("box lower bound exceeds upper bound")
            b.setflags(write=False)
            object.__setattr__(self, "bounds", b)
        elif self.kind == "disk":
            c = np.asarray(self.center, dtype=float)
            if c.shape != (2,):
                raise ValueError("disk domains are only defined in two dimensions")
            if self.radius is None or not self.radius > 0:
                raise ValueError("disk radius must be positive")
            c.setflags(write=False)
            object.__setattr__(self, "center", c)
            object.__setattr__(self, "radius", float(self.radius))
        else:
            raise ValueError(f"unknown domain kind {self.kind!r}")

    @classmethod
    def box(cls, *intervals) -> "Domain":
        return cls("box", bounds=np.array(intervals, dtype=float))

    @classmethod
    def disk(cls, center, radius) -> "Domain":
        return cls("disk", center=np.array(center, dtype=float), radius=radius)

    @property
    def dim(self) -> int:
        return self.bounds.shape[0] if self.kind == "box" else 2

    @property
    def bounding_box(self) -> np.ndarray:
        if self.kind == "box":
            return self.bounds
        r = self.radius
        return np.column_stack([self.center - r, self.center + r])

    def contains(self, x) -> np.ndarray | bool:
        x = np.asarray(x, dtype=float)
        if self.kind == "box":
            inside = np.all((x >= self.bounds[:, 0]) & (x <= self.bounds[:, 1]), axis=-1)
        else:
            inside = np.sum((x - self.center) ** 2, axis=-1) <= self.radius**2
        return inside if inside.ndim else bool(inside)

    def scaled(self, factor: float) -> "Domain":
        if self.kind == "box":
            return Domain("box", bounds=self.bounds / factor)
        return Domain("disk", center=self.center / factor, radius=self.radius / factor)

    def extended(self, interval) -> "Domain":
        if self.kind != "box":
            raise ValueError("only box domains can be extended by a coordinate")
        return Domain("box", bounds=np.vstack([self.bounds, np.asarray(interval, dtype=float)]))


@dataclass(frozen=True)
class OdeSystem:
    """A named dynamical system dx/dt = F(x, t) together with its sampling domain.

    ``scale`` is the factor relating the system's coordinates to the physical
    ones (physical = scale * internal).  It is 1 except for systems produced
    by :func:`scale_system`.
    """

    name: str
    dim: int
    rhs: Rhs = field(repr=False, compare=False)
    domain: Domain = field(repr=False)
    default_dt: float
    is_autonomous: bool = True
    time_interval: tuple[float, float] | None = None
    augmented_time: bool = False
    scale: float = 1.0
    linear: tuple[np.ndarray, np.ndarray] | None = field(default=None, repr=False, compare=False)
    description: str = field(default="", compare=False)

    def __post_init__(self):
        if self.dim < 1:
            raise ValueError("dim must be positive")
        if not self.default_dt > 0:
            raise ValueError("default_dt must be positive")
        if self.domain.dim != self.dim:
            raise ValueError(f"domain has {self.domain.dim} coordinates, system has {self.dim}")

    def __call__(self, x, t=0.0) -> np.ndarray:
        return self.rhs(np.asarray(x, dtype=float), t)


def _stack(*cols) -> np.ndarray:
    return np.stack(np.broadcast_arrays(*cols), axis=-1)


# ----------------------------------------------------------------------------
# linear systems x' = Ax + b

LINEAR_SYSTEMS = {
    "saddle": ([[1, 1], [1, -1]], [-2, 0], Domain.box((0, 2), (0, 2))),
    "nodal_sink": ([[-2, 1], [1, -2]], [-2, 1], Domain.box((-2, 0), (-1, 1))),
    "improper_node": ([[1, -4], [4, -7]], [0, 0], Domain.box((-1, 1), (-1, 1))),
    "star": ([[-1, 0], [0, -1]], [0, 0], Domain.box((-1, 1), (-1, 1))),
    "center": ([[1, 2], [-5, -1]], [0, 0], Domain.box((-1, 1), (-1, 1))),
    "spiral": ([[-1, -1], [2, -1]], [-1, 5], Domain.disk((-2, 1), 1.0)),
}


def linear_system(name: str, A, b, domain: Domain, dt: float = 0.1) -> OdeSystem:
    A = np.array(A, dtype=float)
    b = np.array(b, dtype=float)
    A.setflags(write=False)
    b.setflags(write=False)

    def rhs(x, t=0.0):
        return x @ A.T + b

    return OdeSystem(name, A.shape[0], rhs, domain, dt, linear=(A, b),
                     description="linear x' = Ax + b")


# ----------------------------------------------------------------------------
# nonlinear examples


def pendulum(omega2: float = 8.91, gamma: float = 0.2) -> OdeSystem:
    def rhs(x, t=0.0):
        x1, x2 = x[..., 0], x[..., 1]
        return _stack(x2, -gamma * x2 - omega2 * np.sin(x1))

    dom = Domain.box((-np.pi, np.pi), (-2 * np.pi, 2 * np.pi))
    return OdeSystem("pendulum", 2, rhs, dom, 0.1, description="damped pendulum")


def four_critical() -> OdeSystem:
    def rhs(x, t=0.0):
        x1, x2 = x[..., 0], x[..., 1]
        return _stack(-(x1 - x2) * (1 - x1 - x2), x1 * (2 + x2))

    dom = Domain.box((-4, 4), (-3, 3))
    return OdeSystem("four_critical", 2, rhs, dom, 0.05, description="four critical points")


def cubic_barrier() -> OdeSystem:
    def rhs(x, t=0.0):
        x1, x2 = x[..., 0], x[..., 1]
        r = x1**2 + x2**2 - 1
        return _stack(x2 - x1 * r, -x1 - x2 * r)

    dom = Domain.box((-2, 2), (-2, 2))
    return OdeSystem("cubic_barrier", 2, rhs, dom, 0.1, description="unit-circle barrier")


def lotka_volterra() -> OdeSystem:
    def rhs(x, t=0.0):
        x1, x2 = x[..., 0], x[..., 1]
        return _stack(
            x1 * (1 - 0.2 * x1 - 2 * x2 / (x1 + 6)),
            x2 * (-0.25 + x1 / (x1 + 6)),
        )

    dom = Domain.box((0, 5), (0, 5))
    return OdeSystem("lotka_volterra", 2, rhs, dom, 0.1, description="modified predator-prey")


def nonautonomous() -> OdeSystem:
    def rhs(x, t=0.0):
        x1, x2, x3 = x[..., 0], x[..., 1], x[..., 2]
        et = np.exp(-t)
        return _stack(x1 + x3 - t + et, x1 + x2 + 5, -2 * x1 - x3 - 2 * t - et)

    dom = Domain.box((-5, 5), (-10, 0), (-6, 4))
    return OdeSystem(
        "nonautonomous", 3, rhs, dom, 0.05,
        is_autonomous=False, time_interval=(1.0, 2.0),
        description="linear system with explicit time forcing",
    )


def van_der_pol(mu: float = 0.2) -> OdeSystem:
    def rhs(x, t=0.0):
        x1, x2 = x[..., 0], x[..., 1]
        return _stack(x2, -x1 + mu * (1 - x1**2) * x2)

    dom = Domain.box((-3, 3), (-20, 20))
    return OdeSystem("van_der_pol", 2, rhs, dom, 0.05, description="u'' - mu(1-u^2)u' + u = 0")


def fitzhugh_nagumo(k: float = 0.5) -> OdeSystem:
    def rhs(x, t=0.0):
        x1, x2 = x[..., 0], x[..., 1]
        return _stack(3 * (x1 + x2 - x1**3 / 3 - k), -(x1 + 0.8 * x2 - 0.7) / 3)

    dom = Domain.box((-5, 5), (-5, 5))
    return OdeSystem("fitzhugh_nagumo", 2, rhs, dom, 0.05, description="neural impulse model")


def toggle_switch(alpha1=156.25, alpha2=15.6, gamma=1.0, beta=2.5, K=2.9618e-5,
                  iptg=1e-5, eta=2.0, dt=0.1) -> OdeSystem:
    """Genetic toggle switch with the algebraic repressor variable eliminated.

    z = x1 / (1 + iptg/K)**eta is substituted into the second equation;
    ``eta`` has no published value and defaults to 2.
    """
    z_factor = 1.0 / (1.0 + iptg / K) ** eta

    def rhs(x, t=0.0):
        x1, x2 = x[..., 0], x[..., 1]
        z = x1 * z_factor
        return _stack(alpha1 / (1 + x2**beta) - x1, alpha2 / (1 + z**gamma) - x2)

    dom = Domain.box((0, 20), (0, 20))
    return OdeSystem("toggle", 2, rhs, dom, dt, description="genetic toggle switch")


ELECTRIC_DEFAULTS = dict(C=1e-2, L=1.0, U0=1.0, G0=-0.1, Ginf=0.25)


def electric_currents(x, C=1e-2, L=1.0, U0=1.0, G0=-0.1, Ginf=0.25):
    """Branch currents (v1, v2) solving the network's two algebraic constraints."""
    x = np.asarray(x, dtype=float)
    x1, x2 = x[..., 0], x[..., 1]
    v1 = (G0 - Ginf) * U0 * np.tanh(x1 / U0) + Ginf * x1
    v2 = -x2 - v1
    return v1, v2


def electric_network(C=1e-2, L=1.0, U0=1.0, G0=-0.1, Ginf=0.25) -> OdeSystem:
    def rhs(x, t=0.0):
        _, v2 = electric_currents(x, C, L, U0, G0, Ginf)
        return _stack(v2 / C, x[..., 0] / L)

    dom = Domain.box((-2, 2), (-0.2, 0.2))
    return OdeSystem("electric_network", 2, rhs, dom, 0.05, description="nonlinear RLC network")


# ----------------------------------------------------------------------------
# transformations


def autonomize(system: OdeSystem, time_interval=None) -> OdeSystem:
    """Append time as a state coordinate with unit derivative."""
    if system.is_autonomous:
        raise ValueError(f"{system.name} is already autonomous")
    interval = time_interval if time_interval is not None else system.time_interval
    if interval is None:
        raise ValueError("a time interval is needed to extend the domain")
    f = system.rhs

    def rhs(x, t=0.0):
        y, tau = x[..., :-1], x[..., -1]
        dy = f(y, tau)
        return np.concatenate([dy, np.ones_like(tau)[..., None]], axis=-1)

    return OdeSystem(
        f"{system.name}_{system.dim + 1}d", system.dim + 1, rhs,
        system.domain.extended(interval), system.default_dt,
        is_autonomous=True, time_interval=tuple(interval), augmented_time=True,
        scale=system.scale, description=f"{system.description} (time as state)",
    )


def scale_system(system: OdeSystem, factor: float) -> OdeSystem:
    """Rewrite the system in coordinates u = x / factor."""
    if not factor > 0:
        raise ValueError("scale factor must be positive")
    factor = float(factor)
    f = system.rhs

    def rhs(u, t=0.0):
        return f(factor * u, t) / factor

    return replace(
        system,
        name=f"{system.name}_scaled",
        rhs=rhs,
        domain=system.domain.scaled(factor),
        scale=system.scale * factor,
        linear=None,
    )


TOGGLE_SCALE = 20.0


def catalog() -> list[OdeSystem]:
    systems = [linear_system(name, A, b, dom) for name, (A, b, dom) in LINEAR_SYSTEMS.items()]
    toggle = toggle_switch()
    na = nonautonomous()
    systems += [
        pendulum(),
        four_critical(),
        cubic_barrier(),
        lotka_volterra(),
        na,
        autonomize(na),
        van_der_pol(),
        fitzhugh_nagumo(),
        toggle,
        scale_system(toggle, TOGGLE_SCALE),
        electric_network(),
    ]
    return systems


def get_system(name: str) -> OdeSystem:
    for s in catalog():
        if s.name == name:
            return s
    raise KeyError(f"unknown system {name!r}; known: {', '.join(system_ids())}")


def system_ids() -> list[str]:
    return [s.name for s in catalog()]
