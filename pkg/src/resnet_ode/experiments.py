"""Experiment drivers: architecture sweep, target study, density study,
trajectory simulation and target-order study.

Each driver takes an :class:`ExperimentConfig`, writes one or more CSV files
into ``cfg.output_dir`` (each with a ``.json`` sidecar holding the resolved
configuration) and returns the rows it wrote.
"""

from __future__ import annotations

import csv
import hashlib
import json
import logging
import os
import subprocess
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, fields, replace
from pathlib import Path

import numpy as np

from . import __version__
from .dataset import generate_pairs, generate_reference_pairs
from .integrators import NonFiniteStateError, get_scheme
from .metrics import fit_order, mean_l2_error, target_mean_l2_error
from .network import Architecture, NetParams, resnet_forward
from .rollout import simulate_reference, simulate_resnet
from .systems import LINEAR_SYSTEMS, get_system
from .training import TrainConfig, train, train_multi_seed

log = logging.getLogger(__name__)

EXPERIMENTS = ("arch_sweep", "target_study", "density_study", "trajectory", "order_study")
SEED_ENV = "RESNET_ODE_SEED"

# Per-system defaults.  arch = (hidden layers, neurons); trajectories run from
# t0 to T.  Linear systems take a larger learning rate because their inputs
# and residuals are small; systems with wide domains need a smaller one or
# per-sample SGD blows up in the first pass.
PRESETS = {
    "saddle": dict(arch=(1, 2), x0=(1.5, 0.0), T=2.0),
    "nodal_sink": dict(arch=(1, 6), x0=(0.0, -0.5), T=2.0),
    "improper_node": dict(arch=(1, 6), x0=(0.5, 0.5), T=2.0),
    "star": dict(arch=(1, 6), x0=(0.5, 0.5), T=2.0),
    "center": dict(arch=(1, 6), x0=(0.5, 0.0), T=2.0),
    "spiral": dict(arch=(1, 6), x0=(-2.0, 1.5), T=2.0),
    "pendulum": dict(arch=(2, 40), x0=(2.0, 0.0), T=10.0, lr=7e-3,
                     grid_layers=[1, 2, 3, 4, 5, 6], grid_widths=[20, 40, 60, 80]),
    "four_critical": dict(arch=(2, 64), x0=(2.0, 1.0), T=4.0),
    "cubic_barrier": dict(arch=(3, 80), x0=(2.0, 0.0), T=7.0),
    "lotka_volterra": dict(arch=(2, 128), x0=(3.0, 3.0), T=20.0, thin=6, lr=5e-3),
    "nonautonomous_4d": dict(arch=(1, 8), x0=(2.0, -9.0, 0.0, 1.1), t0=1.1, T=2.0),
    "van_der_pol": dict(arch=(2, 64), x0=(-3.0, 2.0), T=10.0, lr=2e-4),
    "fitzhugh_nagumo": dict(arch=(2, 64), x0=(-1.0, 2.0), T=1.0, lr=3e-3),
    "toggle_scaled": dict(arch=(2, 40), x0=(19.0, 17.0), T=5.0, thin=4, lr=0.1),
    "electric_network": dict(arch=(2, 64), x0=(1.0, 0.15), T=0.5),
}
for _name in LINEAR_SYSTEMS:
    PRESETS[_name].update(lr=0.1, J=500, grid_layers=[1, 2, 3, 4], grid_widths=[2, 4, 6, 8, 10])


@dataclass
class ExperimentConfig:
    experiment: str
    system_id: str
    output_dir: str = "results"
    dt: float | None = None
    J: int | None = None
    K: int = 500
    lr: float | None = None
    lr_decay: float = 0.999
    arch: tuple[int, int] | None = None
    grid_layers: list[int] | None = None
    grid_widths: list[int] | None = None
    schemes: list[str] = field(default_factory=lambda: ["euler", "rk2", "rk4"])
    seed: int = 0
    runs: int = 10
    data_seed: int | None = None
    substeps: int = 1000
    density_J: list[int] = field(default_factory=lambda: [100, 500, 2000, 10000])
    update_budget: int = 1_000_000
    density_arch: tuple[int, int] = (6, 40)
    density_scheme: str = "reference"
    trace_points: int = 100
    order_dts: list[float] = field(default_factory=lambda: [0.2, 0.1, 0.05, 0.025])
    x0: list[float] | None = None
    t0: float | None = None
    T: float | None = None
    thin: int | None = None
    jobs: int = 1
    engine: str = "auto"

    def __post_init__(self):
        if self.experiment not in EXPERIMENTS:
            raise ValueError(f"unknown experiment {self.experiment!r}; choose from {EXPERIMENTS}")
        if self.K < 1 or self.runs < 1 or self.jobs < 1:
            raise ValueError("K, runs and jobs must be positive")
        if self.arch is not None:
            self.arch = tuple(self.arch)
        self.density_arch = tuple(self.density_arch)

    @classmethod
    def from_file(cls, path, **overrides) -> "ExperimentConfig":
        data = json.loads(Path(path).read_text())
        data.update({k: v for k, v in overrides.items() if v is not None})
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        return cls(**data)

    # resolved values -------------------------------------------------------

    @property
    def system(self):
        return get_system(self.system_id)

    @property
    def preset(self) -> dict:
        return PRESETS.get(self.system_id, {})

    def _pick(self, name, fallback):
        v = getattr(self, name)
        if v is not None:
            return v
        return self.preset.get(name, fallback)

    def resolved(self) -> dict:
        s = self.system
        p = self.preset
        arch = self._pick("arch", (2, 40))
        return {
            **asdict(self),
            "dt": float(self.dt if self.dt is not None else s.default_dt),
            "J": int(self._pick("J", 2000)),
            "lr": float(self._pick("lr", 1e-2)),
            "arch": list(arch),
            "grid_layers": list(self._pick("grid_layers", [1, 2, 3])),
            "grid_widths": list(self._pick("grid_widths", [20, 40, 64])),
            "data_seed": int(self.data_seed if self.data_seed is not None else self.seed),
            "x0": [float(v) for v in (self.x0 if self.x0 is not None
                                        else p.get("x0", s.domain.bounding_box.mean(axis=1)))],
            "t0": float(self._pick("t0", 0.0)),
            "T": float(self._pick("T", 1.0)),
            "thin": int(self._pick("thin", 1)),
            "density_arch": list(self.density_arch),
        }

    def train_config(self, seed=None, iterations=None, trace_every=1) -> TrainConfig:
        r = self.resolved()
        return TrainConfig(
            iterations=iterations or self.K, learning_rate=r["lr"], lr_decay=self.lr_decay,
            seed=self.seed if seed is None else seed, trace_every=trace_every, engine=self.engine,
        )


def version_string() -> str:
    try:
        out = subprocess.run(
            ["git", "describe", "--always", "--dirty", "--tags"],
            cwd=Path(__file__).parent, capture_output=True, text=True, timeout=5,
        )
        if out.returncode == 0 and out.stdout.strip():
            return f"{__version__}+{out.stdout.strip()}"
    except (OSError, subprocess.SubprocessError):
        pass
    return __version__


# ----------------------------------------------------------------------------
# output helpers


def _fmt(v):
    if isinstance(v, float):
        return repr(v)
    if isinstance(v, (list, tuple)):
        return ";".join(_fmt(x) for x in v)
    return str(v)


def write_csv(path: Path, columns: list[str], rows: list[dict], config: dict) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(columns)
        for row in rows:
            w.writerow([_fmt(row[c]) for c in columns])
    sidecar = {"file": path.name, "columns": columns, "config": config, "version": version_string()}
    path.with_name(path.name + ".json").write_text(json.dumps(sidecar, indent=2, sort_keys=True) + "\n")
    return path


def read_csv(path) -> list[dict]:
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


def _out(cfg: ExperimentConfig) -> Path:
    return Path(cfg.output_dir)


def _data(cfg: ExperimentConfig, scheme: str, J: int | None = None, seed: int | None = None):
    r = cfg.resolved()
    s = cfg.system
    J = J or r["J"]
    seed = r["data_seed"] if seed is None else seed
    if scheme == "reference":
        return generate_reference_pairs(s, r["dt"], J, seed, cfg.substeps)
    return generate_pairs(s, scheme, r["dt"], J, seed)


def _scheme_label(name: str) -> str:
    if name == "reference":
        return name
    kind = get_scheme(name).kind
    return "rk4" if kind == "rk4_38" else kind


# ----------------------------------------------------------------------------
# architecture sweep


def _sweep_cell(cfg: ExperimentConfig, layers: int, width: int, learning, reference) -> dict:
    arch = Architecture(cfg.system.dim, layers, width)
    res = train_multi_seed(arch, learning, reference, cfg.train_config(), cfg.runs)
    return {
        "layers": layers, "neurons": width,
        "max_linf": res.max_linf, "mean_l2": res.mean_l2,
        "runs": cfg.runs, "failures": res.failures,
        "per_run_max_linf": res.per_run_max_linf, "per_run_mean_l2": res.per_run_mean_l2,
    }


ARCH_COLUMNS = ["layers", "neurons", "max_linf", "mean_l2", "runs", "failures",
                "per_run_max_linf", "per_run_mean_l2"]


def run_arch_sweep(cfg: ExperimentConfig) -> list[dict]:
    """Train every (layers, neurons) cell on refined-mesh targets, averaged over seeds."""
    r = cfg.resolved()
    cells = [(L, W) for L in r["grid_layers"] for W in r["grid_widths"]]
    if not cells:
        raise ValueError("architecture grid is empty")
    reference = _data(cfg, "reference")
    if cfg.jobs > 1:
        with ProcessPoolExecutor(max_workers=cfg.jobs) as pool:
            futures = [pool.submit(_sweep_cell, cfg, L, W, reference, reference) for L, W in cells]
            rows = [f.result() for f in futures]
    else:
        rows = [_sweep_cell(cfg, L, W, reference, reference) for L, W in cells]
    write_csv(_out(cfg) / "arch_sweep.csv", ARCH_COLUMNS, rows, r)
    return rows


# ----------------------------------------------------------------------------
# target study


TARGET_COLUMNS = ["scheme", "iteration", "net_error", "target_error"]


def _train_scheme(cfg: ExperimentConfig, scheme: str, reference, trace_every=1):
    r = cfg.resolved()
    learning = _data(cfg, scheme)
    arch = Architecture(cfg.system.dim, *r["arch"])
    rec = train(arch, learning, reference, cfg.train_config(trace_every=trace_every))
    return learning, rec


def run_target_study(cfg: ExperimentConfig) -> list[dict]:
    """Per-scheme network error trace next to the constant target error."""
    if not cfg.schemes:
        raise ValueError("target study needs at least one scheme")
    r = cfg.resolved()
    reference = _data(cfg, "reference")
    rows = []
    for scheme in cfg.schemes:
        learning, rec = _train_scheme(cfg, scheme, reference)
        tgt = target_mean_l2_error(learning, reference)
        label = _scheme_label(scheme)
        for k, e in zip(rec.iteration_indices, rec.mean_l2_vs_reference):
            rows.append({"scheme": label, "iteration": k, "net_error": e, "target_error": tgt})
    write_csv(_out(cfg) / "target_study.csv", TARGET_COLUMNS, rows, r)
    return rows


def summarize_target_study(rows: list[dict]) -> dict[str, dict]:
    """Final traced error, target error and their ratio per scheme."""
    out = {}
    for row in rows:
        out[row["scheme"]] = row  # rows are in iteration order
    return {
        s: {"net_error": float(v["net_error"]), "target_error": float(v["target_error"]),
            "ratio": float(v["net_error"]) / float(v["target_error"])}
        for s, v in out.items()
    }


# ----------------------------------------------------------------------------
# density study


DENSITY_COLUMNS = ["J", "iterations", "iteration", "updates", "train_mean_l2", "test_mean_l2"]


def density_iterations(update_budget: int, J: int) -> int:
    """Passes over J pairs that spend the update budget (at least one)."""
    return max(1, round(update_budget / J))


def run_density_study(cfg: ExperimentConfig) -> list[dict]:
    """Fixed update budget split over learning sets of different sizes.

    Training error is measured on the learning inputs, test error on an
    independent set drawn with a different seed.
    """
    r = cfg.resolved()
    if not cfg.density_J:
        raise ValueError("density study needs at least one J")
    scheme = cfg.density_scheme
    arch = Architecture(cfg.system.dim, *r["density_arch"])
    test = _data(cfg, "reference", J=max(cfg.density_J), seed=r["data_seed"] + 7919)
    rows = []
    for J in cfg.density_J:
        K = density_iterations(cfg.update_budget, J)
        learning = _data(cfg, scheme, J=J)
        reference = learning if scheme == "reference" else _data(cfg, "reference", J=J)
        every = max(1, K // cfg.trace_points)
        params = None
        done = 0
        # train in chunks so the test error can be traced alongside
        tcfg = cfg.train_config(iterations=K)
        while done < K:
            chunk = min(every, K - done)
            lr0 = tcfg.lr_at(done)
            ccfg = replace(tcfg, iterations=chunk, learning_rate=lr0, trace_every=chunk,
                           seed=cfg.seed + 104729 * done)
            rec = train(arch, learning, reference, ccfg, init=params)
            params = rec.final_params
            done += chunk
            test_err = mean_l2_error(resnet_forward(params, test.y1), test.y2)
            rows.append({"J": J, "iterations": K, "iteration": done, "updates": done * J,
                         "train_mean_l2": rec.mean_l2_vs_reference[-1], "test_mean_l2": test_err})
    write_csv(_out(cfg) / "density_study.csv", DENSITY_COLUMNS, rows, r)
    return rows


# ----------------------------------------------------------------------------
# trajectories


TRAJ_COLUMNS = ["k", "t"]


def _params_key(cfg: ExperimentConfig, scheme: str) -> str:
    r = cfg.resolved()
    keep = {k: r[k] for k in ("system_id", "dt", "J", "K", "lr", "lr_decay", "arch", "seed",
                              "data_seed", "substeps", "engine")}
    keep["scheme"] = scheme
    return hashlib.sha256(json.dumps(keep, sort_keys=True).encode()).hexdigest()[:16]


def trained_params(cfg: ExperimentConfig, scheme: str, reference=None) -> NetParams:
    """Load params for ``scheme`` from the output directory or train them."""
    path = _out(cfg) / f"params_{_scheme_label(scheme)}.json"
    key = _params_key(cfg, scheme)
    tag = path.with_name(path.name + ".key")
    if path.exists() and tag.exists() and tag.read_text().strip() == key:
        return NetParams.load(path)
    if reference is None:
        reference = _data(cfg, "reference")
    _, rec = _train_scheme(cfg, scheme, reference, trace_every=cfg.K)
    path.parent.mkdir(parents=True, exist_ok=True)
    rec.final_params.save(path)
    tag.write_text(key + "\n")
    return rec.final_params


def _write_trajectory(path: Path, traj, config: dict) -> Path:
    n = traj.states.shape[1]
    rows = [{"k": k, "t": float(t), **{f"x_{i}": float(x[i]) for i in range(n)}}
            for k, (t, x) in enumerate(zip(traj.times, traj.states))]
    return write_csv(path, TRAJ_COLUMNS + [f"x_{i}" for i in range(n)], rows, config)


def run_trajectory(cfg: ExperimentConfig) -> dict:
    """Reference trajectory plus one ResNet rollout per scheme-trained network.

    Returns ``{source: Trajectory}``; a network that blows up yields no file
    and is reported under ``"failed"``.
    """
    r = cfg.resolved()
    s = cfg.system
    dt, t0 = r["dt"], r["t0"]
    steps = int(round((r["T"] - t0) / dt))
    if steps < 1:
        raise ValueError("final time must exceed the initial time by at least one step")
    x0 = np.array(r["x0"], dtype=float)
    out = _out(cfg)
    result = {"failed": []}
    ref = simulate_reference(s, x0, t0, dt, steps, cfg.substeps).thinned(r["thin"])
    _write_trajectory(out / "trajectory_reference.csv", ref, r)
    result["reference"] = ref
    reference = _data(cfg, "reference") if cfg.schemes else None
    for scheme in cfg.schemes:
        label = _scheme_label(scheme)
        params = trained_params(cfg, scheme, reference)
        try:
            traj = simulate_resnet(params, x0, t0, dt, steps, scale=s.scale)
        except NonFiniteStateError as exc:
            log.warning("%s network rollout blew up: %s", label, exc)
            result["failed"].append(label)
            continue
        traj.source = f"resnet_{label}"
        _write_trajectory(out / f"trajectory_{label}.csv", traj.thinned(r["thin"]), r)
        result[label] = traj
    return result


# ----------------------------------------------------------------------------
# order study


ORDER_COLUMNS = ["scheme", "dt", "target_error", "fitted_slope"]


def run_order_study(cfg: ExperimentConfig) -> dict[str, float]:
    """Target error at several time lags and the fitted log-log slope per scheme."""
    r = cfg.resolved()
    dts = sorted(cfg.order_dts, reverse=True)
    if len(dts) < 3:
        raise ValueError("order study needs at least three time lags")
    schemes = [sc for sc in cfg.schemes if sc != "reference"]
    s = cfg.system
    errors = {sc: [] for sc in schemes}
    for dt in dts:
        ref = generate_reference_pairs(s, dt, r["J"], r["data_seed"], cfg.substeps)
        for sc in schemes:
            tgt = generate_pairs(s, sc, dt, r["J"], r["data_seed"])
            errors[sc].append(target_mean_l2_error(tgt, ref))
    slopes = {_scheme_label(sc): fit_order(dts, errors[sc]) for sc in schemes}
    rows = [
        {"scheme": _scheme_label(sc), "dt": float(dt), "target_error": e,
         "fitted_slope": slopes[_scheme_label(sc)]}
        for sc in schemes for dt, e in zip(dts, errors[sc])
    ]
    write_csv(_out(cfg) / "order_study.csv", ORDER_COLUMNS, rows, {**r, "order_dts": dts})
    return slopes


RUNNERS = {
    "arch_sweep": run_arch_sweep,
    "target_study": run_target_study,
    "density_study": run_density_study,
    "trajectory": run_trajectory,
    "order_study": run_order_study,
}


def run(cfg: ExperimentConfig):
    if os.environ.get(SEED_ENV):
        cfg = replace(cfg, seed=int(os.environ[SEED_ENV]))
    return RUNNERS[cfg.experiment](cfg)
