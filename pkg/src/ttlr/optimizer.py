"""Deterministic L-BFGS with backtracking Armijo line search.

Plain two-loop recursion over a bounded history of (s, y) pairs, with a
curvature guard that skips pairs whose s^T y is too small to keep the implicit
Hessian approximation positive definite. Everything is single threaded and
free of randomness, so identical inputs give bit-identical traces.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

__all__ = ["OptimizerConfig", "OptimizationTrace", "lbfgs_minimize"]


@dataclass(frozen=True)
class OptimizerConfig:
    memory: int = 10
    max_iters: int = 500
    grad_tol: float = 1e-6
    armijo_c1: float = 1e-4
    backtrack_factor: float = 0.5
    max_backtracks: int = 50

    def __post_init__(self):
        if self.memory < 1:
            raise ValueError("memory must be >= 1")
        if self.grad_tol <= 0.0:
            raise ValueError("grad_tol must be > 0")
        if not (0.0 < self.armijo_c1 < 1.0):
            raise ValueError("armijo_c1 must lie in (0, 1)")
        if not (0.0 < self.backtrack_factor < 1.0):
            raise ValueError("backtrack_factor must lie in (0, 1)")


@dataclass
class OptimizationTrace:
    """Per accepted iteration: objective value, gradient sup-norm, step length.

    Row 0 records the starting point with step length 0; objective values are
    non-increasing across rows.
    """

    objective_values: list = field(default_factory=list)
    grad_sup_norms: list = field(default_factory=list)
    step_lengths: list = field(default_factory=list)
    termination: str = ""
    warnings: list = field(default_factory=list)

    @property
    def iterations(self) -> int:
        return max(len(self.objective_values) - 1, 0)

    def record(self, value: float, grad_norm: float, step: float) -> None:
        self.objective_values.append(float(value))
        self.grad_sup_norms.append(float(grad_norm))
        self.step_lengths.append(float(step))


def _two_loop_direction(grad, s_list, y_list, rho_list):
    """H g via the standard two-loop recursion; H0 = gamma I from the last pair."""
    q = grad.copy()
    alphas = []
    for s, y, rho in zip(reversed(s_list), reversed(y_list), reversed(rho_list)):
        alpha = rho * float(s @ q)
        q -= alpha * y
        alphas.append(alpha)
    if s_list:
        gamma = float(s_list[-1] @ y_list[-1]) / float(y_list[-1] @ y_list[-1])
        q *= gamma
    for (s, y, rho), alpha in zip(zip(s_list, y_list, rho_list), reversed(alphas)):
        beta = rho * float(y @ q)
        q += (alpha - beta) * s
    return -q


def lbfgs_minimize(objective, init, config: OptimizerConfig | None = None):
    """Minimize a value-and-gradient callable from a flat start vector.

    Terminates when the gradient sup-norm drops to grad_tol, after max_iters
    accepted steps, or when the line search cannot make progress (returning
    the best point so far, recorded in the trace, not raised). The objective
    must be finite at init.
    """
    config = config or OptimizerConfig()
    x = np.array(init, dtype=float).ravel()
    f, g = objective(x)
    g = np.asarray(g, dtype=float).ravel()
    if not np.isfinite(f) or not np.isfinite(g).all():
        raise ValueError("objective must be finite at the starting point")

    trace = OptimizationTrace()
    trace.record(f, np.abs(g).max(), 0.0)
    if np.abs(g).max() <= config.grad_tol:
        trace.termination = "converged"
        return x, trace

    s_list, y_list, rho_list = [], [], []
    for _ in range(config.max_iters):
        d = _two_loop_direction(g, s_list, y_list, rho_list)
        slope = float(d @ g)
        if slope >= 0.0:
            # Stale curvature made the direction non-descent; restart from
            # steepest descent.
            s_list, y_list, rho_list = [], [], []
            d = -g
            slope = float(d @ g)

        step = 1.0
        accepted = False
        for _ in range(config.max_backtracks + 1):
            x_new = x + step * d
            f_new, g_new = objective(x_new)
            if np.isfinite(f_new) and f_new <= f + config.armijo_c1 * step * slope:
                accepted = True
                break
            step *= config.backtrack_factor
        if not accepted:
            trace.termination = "line_search_failed"
            return x, trace

        g_new = np.asarray(g_new, dtype=float).ravel()
        s = x_new - x
        ygap = g_new - g
        sty = float(s @ ygap)
        if sty > 1e-12 * float(np.linalg.norm(s)) * float(np.linalg.norm(ygap)):
            s_list.append(s)
            y_list.append(ygap)
            rho_list.append(1.0 / sty)
            if len(s_list) > config.memory:
                s_list.pop(0)
                y_list.pop(0)
                rho_list.pop(0)

        x, f, g = x_new, f_new, g_new
        trace.record(f, np.abs(g).max(), step)
        if np.abs(g).max() <= config.grad_tol:
            trace.termination = "converged"
            return x, trace

    trace.termination = "max_iterations"
    return x, trace
