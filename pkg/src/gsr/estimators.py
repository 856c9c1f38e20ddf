"""Solvers for the regularized reconstruction problem.

All estimators compute (variants of) xhat = (I + S(w))^(-1) y. The direct
solver factorizes the dense system, the conjugate-gradient solver applies
S(w) through its edge-local form, and the distributed solver runs the
fixed-point recursion xhat_t = -S(w) xhat_{t-1} + y that converges when
||S(w)|| < 1. A masked variant solves the interpolation normal equations
and a diffusion-kernel ridge regression serves as an external baseline.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Optional

import numpy as np
import scipy.linalg

from .errors import SingularSystemError
from .graphs import Laplacian, NodeWeights, shift_apply, shift_operator, weight_vector
from .signals import Observation

__all__ = [
    "Method",
    "SolveOptions",
    "SolveReport",
    "filter_matrix",
    "solve",
    "solve_direct",
    "solve_cg",
    "solve_distributed",
    "solve_interpolation",
    "solve_krr_diffusion",
]


class Method(str, Enum):
    DIRECT = "direct"
    CONJUGATE_GRADIENT = "cg"
    DISTRIBUTED = "distributed"


@dataclass(frozen=True)
class SolveOptions:
    """Iterative-solver knobs.

    max_iterations defaults to 10n when left unset; warm_start seeds the
    conjugate-gradient iteration.
    """

    method: Method = Method.DIRECT
    cg_tolerance: float = 1e-8
    max_iterations: Optional[int] = None
    warm_start: Optional[np.ndarray] = None

    def __post_init__(self) -> None:
        if self.cg_tolerance <= 0:
            raise ValueError("cg_tolerance must be positive")
        if self.max_iterations is not None and self.max_iterations < 1:
            raise ValueError("max_iterations must be at least 1")

    def iteration_cap(self, n: int) -> int:
        return self.max_iterations if self.max_iterations is not None else 10 * n


@dataclass(frozen=True)
class SolveReport:
    """Result of one solve: the estimate plus solver diagnostics."""

    estimate: np.ndarray
    iterations_used: int
    final_residual: float
    spectral_norm_bound: Optional[float] = None
    divergence_warning: bool = False


def _require_full_mask(obs: Observation) -> None:
    if not obs.is_full:
        raise ValueError("this solver requires a full observation mask")


def filter_matrix(lap: Laplacian, w: NodeWeights) -> np.ndarray:
    """Dense reconstruction filter H = (I + S(w))^(-1)."""
    n = lap.n
    system = np.eye(n) + shift_operator(lap, w)
    return scipy.linalg.solve(system, np.eye(n), assume_a="pos")


def solve(
    lap: Laplacian, w: NodeWeights, obs: Observation, opts: Optional[SolveOptions] = None
) -> SolveReport:
    """Dispatch on opts.method."""
    opts = opts or SolveOptions()
    if opts.method is Method.DIRECT:
        return solve_direct(lap, w, obs)
    if opts.method is Method.CONJUGATE_GRADIENT:
        return solve_cg(lap, w, obs, opts)
    return solve_distributed(lap, w, obs, opts)


def solve_direct(lap: Laplacian, w: NodeWeights, obs: Observation) -> SolveReport:
    """Factorize (I + S(w)) and solve; always well-posed (PSD plus identity)."""
    _require_full_mask(obs)
    n = lap.n
    system = np.eye(n) + shift_operator(lap, w)
    xhat = scipy.linalg.solve(system, obs.y, assume_a="pos")
    residual = float(np.linalg.norm(system @ xhat - obs.y))
    return SolveReport(estimate=xhat, iterations_used=0, final_residual=residual)


def solve_cg(
    lap: Laplacian, w: NodeWeights, obs: Observation, opts: Optional[SolveOptions] = None
) -> SolveReport:
    """Conjugate gradient on (I + S(w)) xhat = y.

    The matrix is applied only through the edge-local form of S(w), so one
    iteration costs O(edges). Stops when the squared residual falls to
    eps^2 times its initial value or the iteration cap is reached; on
    non-convergence the best iterate is returned with its residual and the
    caller decides.
    """
    opts = opts or SolveOptions()
    _require_full_mask(obs)
    n = lap.n
    vec = weight_vector(w, n)
    y = obs.y

    def apply_system(v: np.ndarray) -> np.ndarray:
        return v + shift_apply(lap, vec, v)

    x = np.zeros(n) if opts.warm_start is None else np.asarray(opts.warm_start, dtype=float).copy()
    r = y - apply_system(x)
    b = r.copy()
    d0 = d_new = float(r @ r)
    eps2 = opts.cg_tolerance**2
    cap = opts.iteration_cap(n)
    tau = 0
    while tau < cap and d_new > eps2 * d0:
        sb = apply_system(b)
        c = d_new / float(b @ sb)
        x = x + c * b
        r = r - c * sb
        d_old, d_new = d_new, float(r @ r)
        b = r + (d_new / d_old) * b
        tau += 1
    return SolveReport(estimate=x, iterations_used=tau, final_residual=float(np.sqrt(d_new)))


def solve_distributed(
    lap: Laplacian, w: NodeWeights, obs: Observation, opts: Optional[SolveOptions] = None
) -> SolveReport:
    """Fixed-point recursion xhat_t = -S(w) xhat_{t-1} + y for T steps.

    Reports the spectral norm of S(w); when it is >= 1 the recursion
    diverges, which is flagged in the report but the iterations still run
    as requested.
    """
    opts = opts or SolveOptions()
    _require_full_mask(obs)
    n = lap.n
    vec = weight_vector(w, n)
    s_norm = _spectral_norm(lap, vec)
    y = obs.y
    x = np.zeros(n)
    steps = opts.iteration_cap(n)
    for _ in range(steps):
        x = -shift_apply(lap, vec, x) + y
    residual = float(np.linalg.norm(x + shift_apply(lap, vec, x) - y))
    return SolveReport(
        estimate=x,
        iterations_used=steps,
        final_residual=residual,
        spectral_norm_bound=s_norm,
        divergence_warning=s_norm >= 1.0,
    )


def _spectral_norm(lap: Laplacian, vec: np.ndarray) -> float:
    """||S(w)||: S is PSD so this is its largest eigenvalue."""
    n = lap.n
    if n <= 2000:
        s = np.outer(vec, vec) * lap.matrix
        return float(np.linalg.eigvalsh(s)[-1])
    rng = np.random.default_rng(0)
    v = rng.standard_normal(n)
    v /= np.linalg.norm(v)
    lam = 0.0
    for _ in range(5000):
        u = shift_apply(lap, vec, v)
        norm = np.linalg.norm(u)
        if norm == 0.0:
            return 0.0
        v = u / norm
        lam_new = float(v @ shift_apply(lap, vec, v))
        if abs(lam_new - lam) <= 1e-10 * max(abs(lam_new), 1.0):
            return lam_new
        lam = lam_new
    return lam


def solve_interpolation(
    lap: Laplacian, w: NodeWeights, obs: Observation, opts: Optional[SolveOptions] = None
) -> SolveReport:
    """Masked reconstruction: minimize ||P_M (y - x)||^2 + x^T S(w) x.

    P_M is the diagonal projector onto the observed nodes; the normal
    equations (P_M + S(w)) xhat = P_M y are solved directly. The system is
    singular when the regularizer leaves unobserved directions
    unconstrained (for example w = 0 with a partial mask), which raises an
    explicit error.
    """
    n = lap.n
    mask = obs.mask
    p_diag = np.zeros(n)
    p_diag[mask] = 1.0
    system = np.diag(p_diag) + shift_operator(lap, w)
    eigs = np.linalg.eigvalsh(system)
    if eigs[0] <= 1e-12 * max(1.0, float(eigs[-1])):
        raise SingularSystemError(
            "interpolation system is singular: unobserved nodes are unconstrained"
        )
    rhs = p_diag * obs.y
    xhat = scipy.linalg.solve(system, rhs, assume_a="pos")
    residual = float(np.linalg.norm(system @ xhat - rhs))
    return SolveReport(estimate=xhat, iterations_used=0, final_residual=residual)


def solve_krr_diffusion(
    lap: Laplacian,
    obs: Observation,
    sigma2_krr: float = 1.0,
    mu_krr: float = 1e-4,
) -> SolveReport:
    """Kernel ridge regression with the diffusion kernel K = exp(-sigma^2 L / 2).

    xhat = K_M (K_MM + n mu I)^(-1) y_M with M the observed set; the matrix
    exponential is computed from the dense Laplacian eigendecomposition.
    """
    n = lap.n
    lam, u = lap.eigendecomposition
    kernel = (u * np.exp(-sigma2_krr * lam / 2.0)) @ u.T
    mask = obs.mask
    k_m = kernel[:, mask]
    k_mm = kernel[np.ix_(mask, mask)]
    y_m = obs.y[mask]
    alpha = scipy.linalg.solve(k_mm + n * mu_krr * np.eye(mask.size), y_m, assume_a="pos")
    xhat = k_m @ alpha
    return SolveReport(estimate=xhat, iterations_used=0, final_residual=0.0)
