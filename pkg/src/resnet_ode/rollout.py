"""Trajectories from repeated one-step maps: the trained ResNet, a scheme, or the reference."""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .integrators import NonFiniteStateError, get_scheme, reference_step, step
from .network import NetParams, resnet_forward
from .systems import OdeSystem


@dataclass
class Trajectory:
    times: np.ndarray  # (m + 1,)
    states: np.ndarray  # (m + 1, n)
    source: str

    def __len__(self):
        return len(self.times)

    def to_csv(self, path) -> Path:
        path = Path(path)
        n = self.states.shape[1]
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["k", "t"] + [f"x_{i}" for i in range(n)])
            for k, (t, x) in enumerate(zip(self.times, self.states)):
                w.writerow([k, repr(float(t)), *map(repr, x.tolist())])
        return path

    @classmethod
    def from_csv(cls, path, source: str = "") -> "Trajectory":
        data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
        return cls(data[:, 1], data[:, 2:], source)

    def thinned(self, every: int) -> "Trajectory":
        """Keep every ``every``-th state, always including the last one."""
        idx = np.arange(0, len(self), every)
        if idx[-1] != len(self) - 1:
            idx = np.append(idx, len(self) - 1)
        return Trajectory(self.times[idx], self.states[idx], self.source)


def _time_grid(t0, dt, steps):
    return t0 + dt * np.arange(steps + 1)


def _check(dt, steps):
    if not dt > 0:
        raise ValueError("dt must be positive")
    if steps < 1:
        raise ValueError("steps must be at least 1")


def _iterate(one_step, x0, steps, scale):
    x0 = np.asarray(x0, dtype=float)
    states = np.empty((steps + 1, x0.size))
    states[0] = x0
    p = x0 / scale
    for k in range(steps):
        with np.errstate(over="ignore", invalid="ignore"):
            p = one_step(p, k)
        if not np.all(np.isfinite(p)):
            raise NonFiniteStateError(f"state became non-finite at step {k + 1}", index=k + 1)
        states[k + 1] = p * scale
    return states


def simulate_resnet(params: NetParams, x0, t0: float, dt: float, steps: int,
                    scale: float = 1.0) -> Trajectory:
    """p^{k+1} = p^k + N(p^k).

    ``x0`` and the returned states are in physical coordinates; a network
    trained on a system scaled by ``scale`` sees x / scale.
    """
    _check(dt, steps)
    states = _iterate(lambda p, k: resnet_forward(params, p), x0, steps, scale)
    return Trajectory(_time_grid(t0, dt, steps), states, "resnet")


def simulate_reference(system: OdeSystem, x0, t0: float, dt: float, steps: int,
                       substeps: int = 1000) -> Trajectory:
    _check(dt, steps)
    states = _iterate(
        lambda p, k: reference_step(system, p, t0 + k * dt, dt, substeps),
        x0, steps, system.scale,
    )
    return Trajectory(_time_grid(t0, dt, steps), states, "reference")


def simulate_scheme(system: OdeSystem, scheme, x0, t0: float, dt: float, steps: int) -> Trajectory:
    _check(dt, steps)
    sch = get_scheme(scheme)
    states = _iterate(lambda p, k: step(sch, system, p, t0 + k * dt, dt), x0, steps, system.scale)
    return Trajectory(_time_grid(t0, dt, steps), states, sch.kind)


def max_deviation(a: Trajectory, b: Trajectory) -> float:
    """Largest Euclidean distance between matching states."""
    if a.states.shape != b.states.shape:
        raise ValueError("trajectories have different lengths or dimensions")
    return float(np.max(np.linalg.norm(a.states - b.states, axis=1)))


def final_error(a: Trajectory, b: Trajectory) -> float:
    return float(np.linalg.norm(a.states[-1] - b.states[-1]))
