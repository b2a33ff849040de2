"""Per-sample SGD training of the residual network on a learning set.

One iteration is a full pass over the learning set with one
forward/backward/update per pair.  Two engines execute the same
arithmetic: ``"numpy"`` composes :mod:`resnet_ode.network` calls and
``"numba"`` runs the pass in a compiled kernel that updates the parameters
in place.  Each engine is deterministic; they agree to rounding.
"""

from __future__ import annotations

import csv
import logging
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .dataset import LearningSet
from .metrics import max_linf_error, mean_l2_error
from .network import Architecture, NetParams, backward, forward, init_params, resnet_forward, sgd_update

log = logging.getLogger(__name__)

try:
    import numba
except ImportError:  # pragma: no cover
    numba = None


class TrainingDiverged(FloatingPointError):
    def __init__(self, iteration: int, pair: int):
        super().__init__(f"non-finite loss at iteration {iteration}, pair {pair}")
        self.iteration = iteration
        self.pair = pair


@dataclass(frozen=True)
class TrainConfig:
    iterations: int = 500
    learning_rate: float = 1e-2
    lr_decay: float = 0.999
    shuffle_each_iteration: bool = True
    seed: int = 0
    trace_every: int = 1
    engine: str = "auto"

    def __post_init__(self):
        if self.iterations < 1:
            raise ValueError("iterations must be at least 1")
        if not self.learning_rate >= 0:
            raise ValueError("learning rate must be non-negative")
        if not 0 < self.lr_decay <= 1:
            raise ValueError("lr_decay must lie in (0, 1]")
        if self.trace_every < 1:
            raise ValueError("trace_every must be at least 1")
        if self.engine not in ("auto", "numpy", "numba"):
            raise ValueError(f"unknown engine {self.engine!r}")

    def lr_at(self, iteration: int) -> float:
        """Learning rate used during 0-based ``iteration``."""
        return self.learning_rate * self.lr_decay**iteration


@dataclass
class TrainRecord:
    iteration_indices: list[int]
    mean_l2_vs_reference: list[float]
    final_params: NetParams
    updates_performed: int
    max_linf_vs_reference: float = float("nan")
    final_mean_l2: float = float("nan")

    def trace_to_csv(self, path) -> Path:
        path = Path(path)
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["iteration", "mean_l2"])
            for k, e in zip(self.iteration_indices, self.mean_l2_vs_reference):
                w.writerow([k, repr(e)])
        return path


# ----------------------------------------------------------------------------
# numba kernel

if numba is not None:

    @numba.njit(cache=True)
    def _numba_pass(Ws, bs, y1, y2, order, lr, acts, pres, deltas):
        """One pass over ``order``; returns the offending pair index or -1."""
        L = len(Ws)
        n = y1.shape[1]
        for j in order:
            a0 = acts[0]
            for k in range(n):
                a0[k] = y1[j, k]
            for i in range(L):
                W = Ws[i]
                b = bs[i]
                a_in = acts[i]
                z = pres[i]
                a_out = acts[i + 1]
                for r in range(W.shape[0]):
                    s = 0.0
                    for c in range(W.shape[1]):
                        s += W[r, c] * a_in[c]
                    s += b[r]
                    z[r] = s
                    if i == L - 1:
                        a_out[r] = s
                    else:
                        a_out[r] = s if s > 0.0 else 0.0
            out = acts[L]
            d = deltas[L - 1]
            loss = 0.0
            for k in range(n):
                e = y1[j, k] + out[k] - y2[j, k]
                loss += e * e
                d[k] = 2.0 * e
            if not np.isfinite(loss):
                return j
            # backprop through pre-update weights, then apply the update
            for i in range(L - 1, 0, -1):
                W = Ws[i]
                dn = deltas[i]
                dp = deltas[i - 1]
                zp = pres[i - 1]
                for c in range(W.shape[1]):
                    s = 0.0
                    if zp[c] > 0.0:
                        for r in range(W.shape[0]):
                            s += dn[r] * W[r, c]
                    dp[c] = s
            for i in range(L):
                W = Ws[i]
                b = bs[i]
                dn = deltas[i]
                a_in = acts[i]
                for r in range(W.shape[0]):
                    g = dn[r]
                    for c in range(W.shape[1]):
                        W[r, c] -= lr * (g * a_in[c])
                    b[r] -= lr * g
        return -1


def _resolve_engine(engine: str) -> str:
    if engine == "auto":
        return "numba" if numba is not None else "numpy"
    if engine == "numba" and numba is None:
        raise RuntimeError("numba engine requested but numba is not installed")
    return engine


class _NumbaState:
    def __init__(self, params: NetParams):
        from numba.typed import List

        self.params = params.copy()
        self.Ws = List(self.params.weights)
        self.bs = List(self.params.biases)
        arch = params.architecture
        self.acts = List([np.zeros(w) for w in arch.widths])
        self.pres = List([np.zeros(w) for w in arch.widths[1:]])
        self.deltas = List([np.zeros(w) for w in arch.widths[1:]])

    def run(self, y1, y2, order, lr):
        return _numba_pass(self.Ws, self.bs, y1, y2, order, lr, self.acts, self.pres, self.deltas)


def _numpy_pass(params: NetParams, y1, y2, order, lr):
    with np.errstate(over="ignore", invalid="ignore"):
        return _numpy_pass_inner(params, y1, y2, order, lr)


def _numpy_pass_inner(params, y1, y2, order, lr):
    for j in order:
        x = y1[j]
        out, cache = forward(params, x)
        err = x + out - y2[j]
        if not math.isfinite(float(err @ err)):
            return params, int(j)
        try:
            params = sgd_update(params, backward(params, cache, 2.0 * err), lr)
        except FloatingPointError:
            return params, int(j)
    return params, -1


def _check_sets(learning: LearningSet, reference: LearningSet | None):
    if reference is None:
        return
    if learning.y1.shape != reference.y1.shape or not np.array_equal(learning.y1, reference.y1):
        raise ValueError("learning and reference sets must share identical inputs")


def train(arch: Architecture, learning: LearningSet, reference: LearningSet | None,
          cfg: TrainConfig, init: NetParams | None = None) -> TrainRecord:
    """Train a fresh network (or ``init``) for ``cfg.iterations`` passes.

    After every ``cfg.trace_every``-th pass (and always after the last) the
    mean L2 error of the residual map against ``reference`` is recorded.
    """
    _check_sets(learning, reference)
    if arch.input_dim != learning.dim:
        raise ValueError(f"network input_dim {arch.input_dim} != system dim {learning.dim}")
    params = init.copy() if init is not None else init_params(arch, cfg.seed)
    if params.architecture != arch:
        raise ValueError("initial parameters do not match the architecture")
    engine = _resolve_engine(cfg.engine)
    rng = np.random.default_rng([cfg.seed, 1])
    y1 = np.ascontiguousarray(learning.y1, dtype=float)
    y2 = np.ascontiguousarray(learning.y2, dtype=float)
    J = len(y1)
    order = np.arange(J)
    state = _NumbaState(params) if engine == "numba" else None

    its, trace = [], []
    for k in range(cfg.iterations):
        if cfg.shuffle_each_iteration:
            order = rng.permutation(J)
        lr = cfg.lr_at(k)
        if state is not None:
            bad = state.run(y1, y2, order, lr)
            params = state.params
        else:
            params, bad = _numpy_pass(params, y1, y2, order, lr)
        if bad >= 0:
            raise TrainingDiverged(k, bad)
        if not params.all_finite():
            raise TrainingDiverged(k, -1)
        last = k == cfg.iterations - 1
        if reference is not None and ((k + 1) % cfg.trace_every == 0 or last):
            with np.errstate(over="ignore", invalid="ignore"):
                e = mean_l2_error(resnet_forward(params, reference.y1), reference.y2)
            if not math.isfinite(e):
                raise TrainingDiverged(k, -1)
            its.append(k + 1)
            trace.append(e)
    params = params.copy()
    rec = TrainRecord(its, trace, params, cfg.iterations * J)
    if reference is not None:
        out = resnet_forward(params, reference.y1)
        rec.max_linf_vs_reference = max_linf_error(out, reference.y2)
        rec.final_mean_l2 = mean_l2_error(out, reference.y2)
    return rec


@dataclass
class MultiSeedResult:
    max_linf: float
    mean_l2: float
    per_run_max_linf: list[float]
    per_run_mean_l2: list[float]
    seeds: list[int]
    failed_seeds: list[int] = field(default_factory=list)

    @property
    def failures(self) -> int:
        return len(self.failed_seeds)


def train_multi_seed(arch: Architecture, learning: LearningSet, reference: LearningSet,
                     cfg: TrainConfig, runs: int = 10) -> MultiSeedResult:
    """Average final errors over ``runs`` initializations seeded cfg.seed + r."""
    if runs < 1:
        raise ValueError("runs must be at least 1")
    linf, l2, ok, failed = [], [], [], []
    for r in range(runs):
        seed = cfg.seed + r
        run_cfg = TrainConfig(**{**cfg.__dict__, "seed": seed, "trace_every": cfg.iterations})
        try:
            rec = train(arch, learning, reference, run_cfg)
        except TrainingDiverged as exc:
            log.warning("run with seed %d diverged: %s", seed, exc)
            failed.append(seed)
            continue
        linf.append(rec.max_linf_vs_reference)
        l2.append(rec.final_mean_l2)
        ok.append(seed)
    nan = float("nan")
    return MultiSeedResult(
        max_linf=float(np.mean(linf)) if linf else nan,
        mean_l2=float(np.mean(l2)) if l2 else nan,
        per_run_max_linf=linf, per_run_mean_l2=l2, seeds=ok, failed_seeds=failed,
    )
