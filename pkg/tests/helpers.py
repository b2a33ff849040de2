"""Small systems used only by the tests."""

import numpy as np

from resnet_ode.systems import Domain, OdeSystem


def growth():
    # x' = x on [0, 1]
    return OdeSystem("growth", 1, lambda x, t: np.asarray(x, dtype=float).copy(),
                     Domain.box((0, 1)), 0.1)


def constant(c=(0.7, -1.3)):
    c = np.asarray(c, dtype=float)
    return OdeSystem("constant", 2, lambda x, t: np.broadcast_to(c, np.shape(x)).copy(),
                     Domain.box((-1, 1), (-1, 1)), 0.1)


def time_poly(coeffs):
    """x' = sum_i coeffs[i] t^i, independent of the state; not autonomous."""
    def rhs(x, t):
        v = sum(c * t**i for i, c in enumerate(coeffs))
        return np.full(np.shape(x), v, dtype=float)
    return OdeSystem("time_poly", 1, rhs, Domain.box((-1, 1)), 0.1, is_autonomous=False)


def squared_loss(params, x, y):
    from resnet_ode.network import resnet_forward
    e = resnet_forward(params, x) - y
    return float(e @ e)


def gradient_check(arch, cases, seed, h=1e-6, kink=1e-4):
    """Worst relative error of backward against central differences.

    Relative error is max|analytic - fd| over all entries divided by the
    largest analytic entry, so entries near zero do not blow up the ratio.
    Cases whose hidden pre-activations sit within ``kink`` of zero are
    redrawn, since a difference quotient across the ReLU kink is meaningless.
    """
    from resnet_ode.network import backward, forward, init_params

    rng = np.random.default_rng(seed)
    worst, done, k = 0.0, 0, 0
    while done < cases:
        k += 1
        params = init_params(arch, int(rng.integers(2**31)), bias_std=0.5)
        x = rng.normal(size=arch.input_dim)
        y = rng.normal(size=arch.input_dim)
        out, cache = forward(params, x)
        if any(np.min(np.abs(z)) < kink for z in cache.pre_activations[:-1]):
            continue
        g = backward(params, cache, 2.0 * (x + out - y))
        analytic, numeric = [], []
        for arrays, garrays in ((params.weights, g.weights), (params.biases, g.biases)):
            for a, ga in zip(arrays, garrays):
                for idx in np.ndindex(a.shape):
                    old = a[idx]
                    a[idx] = old + h
                    lp = squared_loss(params, x, y)
                    a[idx] = old - h
                    lm = squared_loss(params, x, y)
                    a[idx] = old
                    analytic.append(ga[idx])
                    numeric.append((lp - lm) / (2 * h))
        analytic, numeric = np.array(analytic), np.array(numeric)
        scale = max(np.max(np.abs(analytic)), 1e-12)
        worst = max(worst, float(np.max(np.abs(analytic - numeric)) / scale))
        done += 1
    return worst
