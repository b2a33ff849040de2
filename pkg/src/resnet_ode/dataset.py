"""Learning sets of (initial state, delta-advanced state) pairs."""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .integrators import NonFiniteStateError, get_scheme, reference_step, step
from .systems import Domain, OdeSystem


@dataclass(frozen=True)
class DataPair:
    y1: np.ndarray
    y2: np.ndarray
    t0: float = 0.0


@dataclass
class LearningSet:
    """J pairs stored as arrays: ``y1`` and ``y2`` are (J, n), ``t0`` is (J,)."""

    y1: np.ndarray
    y2: np.ndarray
    t0: np.ndarray
    system_id: str
    scheme: str
    dt: float
    seed: int

    def __post_init__(self):
        if self.y1.ndim != 2 or self.y1.shape != self.y2.shape:
            raise ValueError("y1 and y2 must be (J, n) arrays of equal shape")
        if len(self.y1) < 1:
            raise ValueError("a learning set needs at least one pair")
        if self.t0.shape != (len(self.y1),):
            raise ValueError("t0 must hold one time per pair")

    def __len__(self):
        return len(self.y1)

    @property
    def dim(self) -> int:
        return self.y1.shape[1]

    @property
    def pairs(self) -> list[DataPair]:
        return [DataPair(a, b, float(t)) for a, b, t in zip(self.y1, self.y2, self.t0)]

    def metadata(self) -> dict:
        return {
            "system_id": self.system_id,
            "scheme": self.scheme,
            "dt": self.dt,
            "seed": self.seed,
            "J": len(self),
        }

    def to_csv(self, path) -> Path:
        """Write pairs to ``path`` and the metadata to ``path`` + ``.json``."""
        path = Path(path)
        n = self.dim
        header = ["j"] + [f"y1_{i}" for i in range(n)] + [f"y2_{i}" for i in range(n)] + ["t0"]
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(header)
            for j in range(len(self)):
                w.writerow([j, *map(repr, self.y1[j].tolist()),
                            *map(repr, self.y2[j].tolist()), repr(float(self.t0[j]))])
        sidecar = path.with_name(path.name + ".json")
        sidecar.write_text(json.dumps(self.metadata(), indent=2, sort_keys=True) + "\n")
        return path

    @classmethod
    def from_csv(cls, path) -> "LearningSet":
        path = Path(path)
        meta = json.loads(path.with_name(path.name + ".json").read_text())
        data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
        n = (data.shape[1] - 2) // 2
        if len(data) != meta["J"]:
            raise ValueError(f"{path}: {len(data)} rows but metadata says J={meta['J']}")
        return cls(
            y1=data[:, 1:1 + n], y2=data[:, 1 + n:1 + 2 * n], t0=data[:, -1],
            system_id=meta["system_id"], scheme=meta["scheme"],
            dt=float(meta["dt"]), seed=int(meta["seed"]),
        )


def _point_stream(seed: int, count: int):
    # one child stream per pair index: pair k depends only on (seed, k)
    return [np.random.default_rng(s) for s in np.random.SeedSequence(seed).spawn(count)]


def sample_domain(domain: Domain, count: int, seed: int) -> np.ndarray:
    """Draw ``count`` i.i.d. uniform points from the domain, shape (count, n)."""
    if count < 1:
        raise ValueError("count must be at least 1")
    lo, hi = domain.bounding_box[:, 0], domain.bounding_box[:, 1]
    out = np.empty((count, domain.dim))
    for k, rng in enumerate(_point_stream(seed, count)):
        while True:
            p = rng.uniform(lo, hi)
            if domain.kind == "box" or domain.contains(p):
                break
        out[k] = p
    return out


def _initial_times(system: OdeSystem, y1: np.ndarray) -> np.ndarray:
    if system.augmented_time:
        return y1[:, -1].copy()
    return np.zeros(len(y1))


def _advance(fn, y1, t0, label):
    try:
        return fn(y1, t0)
    except NonFiniteStateError as exc:
        raise NonFiniteStateError(
            f"{label} target for pair {exc.index} is not finite", index=exc.index
        ) from None


def generate_pairs(system: OdeSystem, scheme, dt: float, count: int, seed: int) -> LearningSet:
    """Uniform initial states with targets from a single step of ``scheme``."""
    if not dt > 0:
        raise ValueError("dt must be positive")
    sch = get_scheme(scheme)
    y1 = sample_domain(system.domain, count, seed)
    t0 = _initial_times(system, y1)
    y2 = _advance(lambda y, t: step(sch, system, y, t, dt), y1, t0, sch.kind)
    return LearningSet(y1, y2, t0, system.name, sch.kind, float(dt), int(seed))


def generate_reference_pairs(system: OdeSystem, dt: float, count: int, seed: int,
                             substeps: int = 1000) -> LearningSet:
    """Same initial states as :func:`generate_pairs`, refined-mesh targets."""
    if not dt > 0:
        raise ValueError("dt must be positive")
    y1 = sample_domain(system.domain, count, seed)
    t0 = _initial_times(system, y1)
    y2 = _advance(lambda y, t: reference_step(system, y, t, dt, substeps), y1, t0, "reference")
    return LearningSet(y1, y2, t0, system.name, "reference", float(dt), int(seed))
