"""Tempered logarithm/exponential kernels and discrete Tsallis information measures.

The temperature parameter t deforms ln/exp: log_t(x) = (x^(1-t) - 1)/(1-t) and
exp_t(x) = [1 + (1-t)x]_+^(1/(1-t)), with t = 1 recovering the standard pair.
For t < 1, log_t is bounded below by -1/(1-t); for t > 1 it is bounded above by
the same constant and exp_t has a heavy polynomial tail on the negative axis.
"""

from __future__ import annotations

import numpy as np

__all__ = [
    "TEMPERATURE_RANGE",
    "validate_temperature",
    "log_t",
    "exp_t",
    "tsallis_entropy",
    "tsallis_divergence",
]

TEMPERATURE_RANGE = (0.0, 2.0)

# Below this distance from t=1 the deformation is numerically
# indistinguishable from ln/exp; dispatch to the standard functions.
T_SWITCH = 1e-6

# Tolerance for "sums to one" checks on probability-vector arguments.
NORMALIZATION_TOL = 1e-8


def validate_temperature(t: float) -> float:
    """Check 0 < t < 2 once, at construction sites; kernels assume it holds."""
    t = float(t)
    if not np.isfinite(t) or not (TEMPERATURE_RANGE[0] < t < TEMPERATURE_RANGE[1]):
        raise ValueError(f"temperature must lie strictly in (0, 2), got {t!r}")
    return t


def log_t(x, t: float):
    """Tempered logarithm (x^(1-t) - 1)/(1-t).

    Accepts scalars or arrays. x must be > 0, except that x = 0 is admitted
    for t < 1 and returns the finite lower bound -1/(1-t). Evaluated as
    expm1((1-t) ln x)/(1-t) so the t -> 1 limit does not cancel catastrophically.
    """
    x = np.asarray(x, dtype=float)
    if np.any(x < 0.0):
        raise ValueError("log_t requires nonnegative input")
    one_minus_t = 1.0 - t
    if abs(one_minus_t) < T_SWITCH:
        if np.any(x == 0.0):
            raise ValueError("log_t(0) diverges for t >= 1")
        out = np.log(x)
        return out if out.ndim else float(out)
    zero = x == 0.0
    if np.any(zero):
        if t >= 1.0:
            raise ValueError("log_t(0) diverges for t >= 1")
        out = np.where(zero, -1.0 / one_minus_t, 0.0)
        pos = ~zero
        out = np.array(out, dtype=float)
        out[pos] = np.expm1(one_minus_t * np.log(x[pos])) / one_minus_t
        return out if out.ndim else float(out)
    out = np.expm1(one_minus_t * np.log(x)) / one_minus_t
    return out if out.ndim else float(out)


def exp_t(x, t: float):
    """Tempered exponential [1 + (1-t)x]_+^(1/(1-t)), the inverse of log_t.

    Total on finite inputs: the clamp yields exact 0.0 below the support
    boundary for t < 1, and +inf at/above the pole x = 1/(t-1) for t > 1.
    Evaluated as exp(log1p((1-t)x)/(1-t)) for stability near t = 1.
    """
    x = np.asarray(x, dtype=float)
    one_minus_t = 1.0 - t
    if abs(one_minus_t) < T_SWITCH:
        out = np.exp(x)
        return out if out.ndim else float(out)
    y = one_minus_t * x
    clamped = y <= -1.0
    if np.any(clamped):
        out = np.where(clamped, 0.0 if t < 1.0 else np.inf, 1.0)
        out = np.array(out, dtype=float)
        live = ~clamped
        out[live] = np.exp(np.log1p(y[live]) / one_minus_t)
        return out if out.ndim else float(out)
    out = np.exp(np.log1p(y) / one_minus_t)
    return out if out.ndim else float(out)


def _check_distribution(p, name: str) -> np.ndarray:
    p = np.asarray(p, dtype=float)
    if p.ndim != 1 or p.size == 0:
        raise ValueError(f"{name} must be a nonempty 1-d vector")
    if np.any(p < 0.0) or not np.isfinite(p).all():
        raise ValueError(f"{name} must be entrywise finite and >= 0")
    if abs(p.sum() - 1.0) > NORMALIZATION_TOL:
        raise ValueError(f"{name} must sum to 1, got {p.sum()!r}")
    return p


def tsallis_entropy(p, t: float) -> float:
    """Sum_c p_c log_t(1/p_c) for a discrete distribution p.

    Zero-probability terms contribute exactly 0 (skipped, not computed via
    IEEE infinities). Reduces to Shannon entropy at t = 1.
    """
    p = _check_distribution(p, "p")
    live = p > 0.0
    pl = p[live]
    return float(np.sum(pl * log_t(1.0 / pl, t)))


def tsallis_divergence(p, q, t: float) -> float:
    """-Sum_c p_c log_t(q_c / p_c); reduces to KL divergence at t = 1.

    Terms with p_c = 0 contribute exactly 0. q_c = 0 against p_c > 0 gives
    +inf for t >= 1 and the finite saturated value for t < 1.
    """
    p = _check_distribution(p, "p")
    q = _check_distribution(q, "q")
    if p.shape != q.shape:
        raise ValueError("p and q must have the same length")
    live = p > 0.0
    pl, ql = p[live], q[live]
    if t >= 1.0 and np.any(ql == 0.0):
        return float("inf")
    return float(-np.sum(pl * log_t(ql / pl, t)))
