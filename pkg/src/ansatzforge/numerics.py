"""Optimizers shared by the search strategies.

Adam drives the joint stochastic search phase; the quasi-Newton minimizer
(BFGS with a strong-Wolfe line search) handles discrete fine-tuning.  The
minimizer tracks the best point seen, so it never reports a value worse
than its starting point even when the line search fails.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = ["AdamState", "adam_step", "QuasiNewtonConfig", "QuasiNewtonResult", "quasi_newton_minimize"]


@dataclass
class AdamState:
    learning_rate: float = 0.01
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8
    m: np.ndarray | None = None
    v: np.ndarray | None = None
    step: int = 0


def adam_step(state: AdamState, params: np.ndarray, grad: np.ndarray) -> np.ndarray:
    """One bias-corrected Adam update; returns the new parameter array."""
    grad = np.asarray(grad, dtype=float)
    if grad.shape != np.shape(params):
        raise ValueError(f"gradient shape {grad.shape} != parameter shape {np.shape(params)}")
    if not np.all(np.isfinite(grad)):
        raise ValueError("non-finite gradient passed to Adam")
    if state.m is None:
        state.m = np.zeros_like(grad)
        state.v = np.zeros_like(grad)
    state.step += 1
    state.m = state.beta1 * state.m + (1.0 - state.beta1) * grad
    state.v = state.beta2 * state.v + (1.0 - state.beta2) * grad * grad
    mhat = state.m / (1.0 - state.beta1**state.step)
    vhat = state.v / (1.0 - state.beta2**state.step)
    return params - state.learning_rate * mhat / (np.sqrt(vhat) + state.eps)


@dataclass
class QuasiNewtonConfig:
    gtol: float = 1e-8
    max_iter: int = 400
    c1: float = 1e-4
    # gradients come free with every evaluation here, so a near-exact line
    # search (small c2) is cheaper overall than the textbook 0.9
    c2: float = 0.2
    max_line_search: int = 30

    def __post_init__(self):
        if self.gtol <= 0:
            raise ValueError("gtol must be positive")


@dataclass
class QuasiNewtonResult:
    x: np.ndarray
    fun: float
    grad: np.ndarray
    converged: bool
    n_iter: int
    n_evals: int
    message: str = ""


class _Objective:
    """Caches the most recent evaluations of a value-and-gradient callable."""

    def __init__(self, fun_grad):
        self.fun_grad = fun_grad
        self.n_evals = 0
        self.best_f = np.inf
        self.best_x = None
        self.best_g = None

    def __call__(self, x: np.ndarray) -> tuple[float, np.ndarray]:
        f, g = self.fun_grad(np.asarray(x, dtype=float))
        g = np.asarray(g, dtype=float)
        self.n_evals += 1
        if np.isfinite(f) and f < self.best_f:
            self.best_f, self.best_x, self.best_g = float(f), np.array(x, dtype=float), g.copy()
        return float(f), g


def _wolfe_line_search(obj, x, f0, g0, direction, c1, c2, max_iter):
    """Strong-Wolfe line search (Nocedal & Wright Alg. 3.5/3.6)."""
    d = direction
    slope0 = float(g0 @ d)
    if slope0 >= 0:
        return None

    def phi(alpha):
        f, g = obj(x + alpha * d)
        return f, float(g @ d), g

    def zoom(lo, f_lo, slope_lo, hi, f_hi):
        for _ in range(max_iter):
            # quadratic interpolation within the bracket, safeguarded
            denom = 2.0 * (f_hi - f_lo - slope_lo * (hi - lo))
            alpha = lo + (-slope_lo * (hi - lo) ** 2) / denom if abs(denom) > 1e-300 else 0.5 * (lo + hi)
            window = abs(hi - lo)
            if not np.isfinite(alpha) or alpha <= min(lo, hi) + 0.1 * window or alpha >= max(lo, hi) - 0.1 * window:
                alpha = 0.5 * (lo + hi)
            f, slope, g = phi(alpha)
            if f > f0 + c1 * alpha * slope0 or f >= f_lo:
                hi, f_hi = alpha, f
            else:
                if abs(slope) <= -c2 * slope0:
                    return alpha, f, g
                if slope * (hi - lo) >= 0:
                    hi, f_hi = lo, f_lo
                lo, f_lo, slope_lo = alpha, f, slope
            if abs(hi - lo) < 1e-16:
                break
        return None

    alpha_prev, f_prev, slope_prev = 0.0, f0, slope0
    alpha = 1.0
    for i in range(max_iter):
        f, slope, g = phi(alpha)
        if f > f0 + c1 * alpha * slope0 or (i > 0 and f >= f_prev):
            return zoom(alpha_prev, f_prev, slope_prev, alpha, f)
        if abs(slope) <= -c2 * slope0:
            return alpha, f, g
        if slope >= 0:
            return zoom(alpha, f, slope, alpha_prev, f_prev)
        alpha_prev, f_prev, slope_prev = alpha, f, slope
        alpha *= 2.0
    return None


def quasi_newton_minimize(
    fun_grad,
    x0: np.ndarray,
    config: QuasiNewtonConfig | None = None,
) -> QuasiNewtonResult:
    """BFGS with full inverse-Hessian updates and a strong-Wolfe line search.

    Returns the best point seen; ``result.fun <= f(x0)`` always holds.
    """
    config = config or QuasiNewtonConfig()
    obj = _Objective(fun_grad)
    x = np.array(x0, dtype=float)
    n = x.size
    f, g = obj(x)
    if n == 0:
        return QuasiNewtonResult(x, f, g, True, 0, obj.n_evals, "empty parameter vector")
    H = np.eye(n)
    converged = float(np.linalg.norm(g, np.inf)) <= config.gtol
    message = "gradient tolerance reached" if converged else "max iterations"
    n_iter = 0
    while not converged and n_iter < config.max_iter:
        n_iter += 1
        d = -H @ g
        hit = _wolfe_line_search(obj, x, f, g, d, config.c1, config.c2, config.max_line_search)
        if hit is None:
            message = "line search failed; returning best seen"
            break
        alpha, f_new, g_new = hit
        s = alpha * d
        y = g_new - g
        sy = float(s @ y)
        if sy > 1e-14:
            if n_iter == 1:
                H *= sy / float(y @ y)
            rho = 1.0 / sy
            Hy = H @ y
            H -= rho * (np.outer(s, Hy) + np.outer(Hy, s))
            H += rho * rho * float(y @ Hy) * np.outer(s, s) + rho * np.outer(s, s)
        x, f, g = x + s, f_new, g_new
        if float(np.linalg.norm(g, np.inf)) <= config.gtol:
            converged = True
            message = "gradient tolerance reached"
    if obj.best_f < f:
        x, f, g = obj.best_x, obj.best_f, obj.best_g
    return QuasiNewtonResult(x, f, g, converged, n_iter, obj.n_evals, message)
