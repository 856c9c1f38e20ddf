"""Optimal design of the per-node regularizer weights.

Three strategies over the lifted variable Omega ~ w w^T:

* A modified-error (linearized) least squares design: minimize
  ||(Omega (*) L) x*||^2 over PSD Omega with the variance-dominance floor
  Omega_ii >= w0*. Dropping the rank-one constraint makes this an SDP.
* A true-error semidefinite relaxation: optimize over the filter H jointly
  with Omega, tying them through the Schur-complement LMI
  [[I + Omega (*) L, I], [I, H]] >= 0, then recover Omega from H* by a
  PSD-constrained least squares fit and extract w.
* Min-max variants for the bounds-only prior, optimizing the worst case
  over the interval corner signals.

Weight vectors are extracted from Omega by the leading scaled eigenpair.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import NamedTuple, Optional, Sequence, Union

import cvxpy as cp
import numpy as np

from .errors import IllConditionedError, SolverError
from .graphs import Adaptive, Laplacian
from .signals import ArrayLike, NoiseModel, SignalBounds, signal_values

__all__ = [
    "ExactSignal",
    "SignalOuterProduct",
    "Bounds",
    "DesignProblem",
    "DesignResult",
    "SdpSolverConfig",
    "RankOneExtraction",
    "design_prony",
    "design_prony_unconstrained",
    "design_sdr",
    "design_minmax_prony",
    "design_minmax_sdr",
    "recover_omega",
    "rank_one_extract",
]


@dataclass(frozen=True)
class ExactSignal:
    """The true signal is known (oracle or hand-picked prior)."""

    x: np.ndarray

    def __post_init__(self) -> None:
        object.__setattr__(self, "x", signal_values(self.x))


@dataclass(frozen=True)
class SignalOuterProduct:
    """Second-moment prior: an estimate of E[x* x*^T], e.g. a training average."""

    matrix: np.ndarray

    def __post_init__(self) -> None:
        m = np.asarray(self.matrix, dtype=float)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ValueError("outer-product prior must be a square matrix")
        if not np.allclose(m, m.T, atol=1e-10 * max(1.0, float(np.abs(m).max(initial=0.0)))):
            raise ValueError("outer-product prior must be symmetric")
        object.__setattr__(self, "matrix", 0.5 * (m + m.T))


@dataclass(frozen=True)
class Bounds:
    """Only elementwise signal bounds are known."""

    bounds: SignalBounds


Prior = Union[ExactSignal, SignalOuterProduct, Bounds]


@dataclass(frozen=True)
class DesignProblem:
    """Inputs of a weight-design run.

    noise is required by the true-error designs and ignored by the
    modified-error ones; w0_star is the scalar-weight floor the designed
    diagonal must dominate.
    """

    lap: Laplacian
    prior: Prior
    w0_star: float
    noise: Optional[NoiseModel] = None

    def __post_init__(self) -> None:
        if self.w0_star < 0:
            raise ValueError("w0_star must be nonnegative")


@dataclass(frozen=True)
class SdpSolverConfig:
    """Conic solver knobs; the backend hint picks the solver family."""

    tolerance: float = 1e-7
    max_iterations: Optional[int] = None
    backend: str = "interior-point"  # or "first-order"

    def __post_init__(self) -> None:
        if self.tolerance <= 0:
            raise ValueError("tolerance must be positive")
        if self.backend not in ("interior-point", "first-order"):
            raise ValueError(f"unknown backend {self.backend!r}")


@dataclass(frozen=True)
class DesignResult:
    """Designed weights plus the lifted matrix and solver diagnostics."""

    omega: Adaptive
    Omega: np.ndarray = field(repr=False)
    objective_value: float
    solver_stats: dict
    rank1_quality: float

    def to_record(self) -> str:
        """One-line text record of the result."""
        omega_csv = ",".join(f"{v:.17g}" for v in self.omega.w)
        residuals = ",".join(
            f"{self.solver_stats[k]:.6g}"
            for k in ("primal_residual", "dual_residual", "duality_gap", "recovery_residual")
            if k in self.solver_stats and self.solver_stats[k] is not None
        )
        return (
            f"omega={omega_csv}; objective={self.objective_value:.17g}; "
            f"rank1_quality={self.rank1_quality:.17g}; residuals={residuals}"
        )


class RankOneExtraction(NamedTuple):
    omega: np.ndarray
    rank1_quality: float


def rank_one_extract(omega_matrix: np.ndarray) -> RankOneExtraction:
    """w = sqrt(lambda_1) u_1 from the leading eigenpair of a PSD matrix.

    The sign is fixed so sum(w) >= 0 (w and -w parameterize the same
    regularizer); rank1_quality is lambda_1 over the sum of eigenvalues,
    defined as 1 for the zero matrix. Ties in the leading eigenvalue are
    resolved by the eigensolver.
    """
    m = np.asarray(omega_matrix, dtype=float)
    m = 0.5 * (m + m.T)
    lam, u = np.linalg.eigh(m)
    lam = np.clip(lam, 0.0, None)
    total = float(lam.sum())
    if total == 0.0:
        return RankOneExtraction(omega=np.zeros(m.shape[0]), rank1_quality=1.0)
    lead = float(lam[-1])
    w = np.sqrt(lead) * u[:, -1]
    if w.sum() < 0:
        w = -w
    return RankOneExtraction(omega=w, rank1_quality=lead / total)


def _prior_outer_product(problem: DesignProblem) -> np.ndarray:
    if isinstance(problem.prior, ExactSignal):
        x = problem.prior.x
        return np.outer(x, x)
    if isinstance(problem.prior, SignalOuterProduct):
        return problem.prior.matrix
    raise ValueError("a bounds prior requires one of the min-max designs")


def _factorize_psd(x_mat: np.ndarray) -> np.ndarray:
    """F with F F^T = X (columns trimmed to the numerical rank)."""
    lam, u = np.linalg.eigh(0.5 * (x_mat + x_mat.T))
    top = float(lam[-1]) if lam.size else 0.0
    if top <= 0.0:
        return np.zeros((x_mat.shape[0], 1))
    keep = lam > 1e-14 * top
    return u[:, keep] * np.sqrt(lam[keep])


def _solver_kwargs(cfg: SdpSolverConfig) -> dict:
    if cfg.backend == "first-order":
        kwargs = {"solver": cp.SCS, "eps": cfg.tolerance}
        if cfg.max_iterations is not None:
            kwargs["max_iters"] = cfg.max_iterations
    else:
        kwargs = {
            "solver": cp.CLARABEL,
            "tol_gap_abs": cfg.tolerance,
            "tol_gap_rel": cfg.tolerance,
            "tol_feas": cfg.tolerance,
        }
        if cfg.max_iterations is not None:
            kwargs["max_iter"] = cfg.max_iterations
    return kwargs


def _run_solver(prob: cp.Problem, cfg: SdpSolverConfig, what: str) -> dict:
    """Solve and return diagnostics; any status short of optimal is an error."""
    try:
        prob.solve(**_solver_kwargs(cfg))
    except cp.error.SolverError as exc:
        raise SolverError(f"{what}: solver failed ({exc})") from exc
    if prob.status in (cp.INFEASIBLE, cp.INFEASIBLE_INACCURATE):
        # The feasible set always contains the scalar-weight point, so an
        # infeasible verdict can only be a solver malfunction.
        raise SolverError(f"{what}: reported infeasible, which indicates a solver bug")
    if prob.status != cp.OPTIMAL:
        raise SolverError(
            f"{what}: solver stopped with status {prob.status!r} "
            f"(objective {prob.value!r}) without reaching tolerance {cfg.tolerance:g}"
        )
    stats = prob.solver_stats
    return {
        "iterations": getattr(stats, "num_iters", None),
        "solve_time": getattr(stats, "solve_time", None),
        "backend": str(getattr(stats, "solver_name", "")),
        "status": prob.status,
    }


def _canonical_zero_point(x: np.ndarray, w0_star: float) -> np.ndarray:
    """Closed-form optimum of the floored modified-error design for a
    nowhere-zero exact prior.

    The weights w = a / x make w * x constant, so S(w) x = a^2
    diag(1/x) L 1 = 0: the objective hits its global minimum of zero.
    Among all such rank-one matrices, scaling a^2 = w0* max_i x_i^2 is the
    smallest that satisfies the diagonal floor (tight at the largest
    |x_i|), and every extracted weight then obeys w_i^2 >= w0*, which is
    exactly the variance-dominance condition.
    """
    alpha2 = w0_star * float(np.max(x**2))
    v = np.sqrt(alpha2) / x
    return np.outer(v, v)


def design_prony(
    problem: DesignProblem,
    cfg: Optional[SdpSolverConfig] = None,
    use_closed_form: bool = True,
) -> DesignResult:
    """Modified-error design with the diagonal floor Omega_ii >= w0*.

    Minimizes tr{(Omega (*) L)^2 X} over PSD Omega. For an exact prior
    with no zero entries the optimum is known in closed form (objective
    zero; see _canonical_zero_point) and is returned directly: the optimal
    face is large and degenerate there, and which of its points a conic
    solver lands on is solver-dependent, including points whose extracted
    weights lose the floor. The closed-form point is deterministic and
    floor-tight. Priors of higher rank (or with zeros) go through the SDP.
    """
    cfg = cfg or SdpSolverConfig()
    lap = problem.lap
    if use_closed_form and isinstance(problem.prior, ExactSignal):
        x = problem.prior.x
        if np.all(x != 0.0):
            omega_mat = _canonical_zero_point(x, problem.w0_star)
            sx = (omega_mat * lap.matrix) @ x
            objective = float(sx @ sx)
            alpha = np.sqrt(problem.w0_star * float(np.max(x**2)))
            w = alpha / x
            if w.sum() < 0:
                w = -w
            stats = {
                "iterations": 0,
                "primal_residual": float(np.sqrt(objective)),
                "duality_gap": 0.0,
                "backend": "closed-form",
                "status": "optimal",
            }
            return DesignResult(
                omega=Adaptive(w=w),
                Omega=omega_mat,
                objective_value=objective,
                solver_stats=stats,
                rank1_quality=1.0,
            )
    return _solve_prony_sdp(problem, cfg, with_floor=True)


def design_prony_unconstrained(
    problem: DesignProblem, cfg: Optional[SdpSolverConfig] = None
) -> DesignResult:
    """Modified-error design without the diagonal floor.

    The zero matrix is always optimal here (the objective vanishes at
    Omega = 0), so the returned point is genuinely solver-dependent; the
    method exists as an experimental baseline for quantifying what the
    floor contributes.
    """
    cfg = cfg or SdpSolverConfig()
    return _solve_prony_sdp(problem, cfg, with_floor=False)


def _solve_prony_sdp(
    problem: DesignProblem, cfg: SdpSolverConfig, with_floor: bool
) -> DesignResult:
    lap = problem.lap
    n = lap.n
    x_mat = _prior_outer_product(problem)
    f = _factorize_psd(x_mat)
    om = cp.Variable((n, n), symmetric=True)
    constraints = [om >> 0]
    if with_floor:
        constraints.append(cp.diag(om) >= problem.w0_star)
    objective = cp.sum_squares(cp.multiply(om, lap.matrix) @ f)
    prob = cp.Problem(cp.Minimize(objective), constraints)
    stats = _run_solver(prob, cfg, "modified-error design")
    omega_mat = 0.5 * (om.value + om.value.T)
    extraction = rank_one_extract(omega_mat)
    stats["primal_residual"] = float(np.sqrt(max(prob.value, 0.0)))
    return DesignResult(
        omega=Adaptive(w=extraction.omega),
        Omega=omega_mat,
        objective_value=float(prob.value),
        solver_stats=stats,
        rank1_quality=extraction.rank1_quality,
    )


def _noise_covariance(problem: DesignProblem) -> np.ndarray:
    if problem.noise is None:
        raise ValueError("the true-error designs require a noise model")
    cov = problem.noise.covariance
    if cov.shape[0] != problem.lap.n:
        raise ValueError("noise covariance dimension does not match the graph")
    return cov


def _isotropic_sigma2(cov: np.ndarray) -> Optional[float]:
    s2 = float(cov[0, 0])
    if np.array_equal(cov, s2 * np.eye(cov.shape[0])):
        return s2
    return None


def _true_error_cost_lifted(
    h: cp.Variable, z: cp.Variable, x_mat: np.ndarray, cov: np.ndarray
) -> cp.Expression:
    """tr{(H^2 - 2H + I)X + H^2 Sigma} with H^2 replaced by the lifted Z."""
    return (
        cp.sum(cp.multiply(z, x_mat + cov))
        - 2.0 * cp.sum(cp.multiply(h, x_mat))
        + float(np.trace(x_mat))
    )


def design_sdr(
    problem: DesignProblem,
    cfg: Optional[SdpSolverConfig] = None,
    encoding: str = "auto",
) -> DesignResult:
    """True-error design through the Schur-complement relaxation.

    Solves, over PSD (Omega, H), the expected squared error
    tr{(H^2 - 2H + I)X + H^2 Sigma} subject to
    [[I + Omega (*) L, I], [I, H]] >= 0 and Omega_ii >= w0*; the quadratic
    H^2 is handled by a PSD slack Z >= H^2 (its own Schur complement),
    minimizing tr{Z(X + Sigma)} - 2tr{HX} + tr{X}. The solved H* is then
    inverted approximately by recover_omega and the weights extracted from
    the recovered matrix.

    encoding "lifted" is the Z-slack form above; "epigraph" is an
    equivalent two-scalar form available when X is rank-one and the noise
    isotropic (tr{H^2(X + Sigma)} = ||Hx||^2 + sigma^2 ||H||_F^2), which
    solves noticeably faster; "auto" picks it when applicable.
    """
    cfg = cfg or SdpSolverConfig()
    if encoding not in ("auto", "lifted", "epigraph"):
        raise ValueError(f"unknown encoding {encoding!r}")
    lap = problem.lap
    n = lap.n
    cov = _noise_covariance(problem)
    x_mat = _prior_outer_product(problem)

    use_epigraph = False
    if encoding in ("auto", "epigraph"):
        sigma2 = _isotropic_sigma2(cov)
        if isinstance(problem.prior, ExactSignal) and sigma2 is not None:
            use_epigraph = True
        elif encoding == "epigraph":
            raise ValueError("epigraph encoding needs an exact prior and isotropic noise")

    om = cp.Variable((n, n), symmetric=True)
    h = cp.Variable((n, n), symmetric=True)
    eye = np.eye(n)
    constraints = [
        om >> 0,
        cp.bmat([[eye + cp.multiply(om, lap.matrix), eye], [eye, h]]) >> 0,
        cp.diag(om) >= problem.w0_star,
    ]
    if use_epigraph:
        x = problem.prior.x
        t_sig = cp.Variable()
        t_fro = cp.Variable()
        constraints += [cp.sum_squares(h @ x) <= t_sig, cp.sum_squares(h) <= t_fro]
        objective = t_sig + sigma2 * t_fro - 2.0 * cp.sum(cp.multiply(h, x_mat)) + float(x @ x)
    else:
        z = cp.Variable((n, n), symmetric=True)
        constraints.append(cp.bmat([[z, h], [h, eye]]) >> 0)
        objective = _true_error_cost_lifted(h, z, x_mat, cov)

    prob = cp.Problem(cp.Minimize(objective), constraints)
    stats = _run_solver(prob, cfg, "true-error design")
    h_star = 0.5 * (h.value + h.value.T)
    return _finish_sdr(problem, cfg, h_star, float(prob.value), stats)


def _finish_sdr(
    problem: DesignProblem,
    cfg: SdpSolverConfig,
    h_star: np.ndarray,
    objective_value: float,
    stats: dict,
) -> DesignResult:
    lap = problem.lap
    omega_mat = recover_omega(h_star, lap, cfg, diagonal_floor=problem.w0_star)
    fit = h_star @ (np.eye(lap.n) + omega_mat * lap.matrix) - np.eye(lap.n)
    stats = dict(stats)
    stats["recovery_residual"] = float(np.linalg.norm(fit))
    extraction = rank_one_extract(omega_mat)
    return DesignResult(
        omega=Adaptive(w=extraction.omega),
        Omega=omega_mat,
        objective_value=objective_value,
        solver_stats=stats,
        rank1_quality=extraction.rank1_quality,
    )


def recover_omega(
    h_star: np.ndarray,
    lap: Laplacian,
    cfg: Optional[SdpSolverConfig] = None,
    diagonal_floor: Optional[float] = None,
) -> np.ndarray:
    """Fit Omega to a filter matrix by PSD-constrained least squares.

    Minimizes ||H*(I + Omega (*) L) - I||_F^2 + ||(I + Omega (*) L)H* - I||_F^2
    over PSD Omega whose off-diagonal support is restricted to the graph's
    edges (off-support entries never enter Omega (*) L, so leaving them
    free would only add null directions). An optional diagonal floor keeps
    the result inside the variance-dominance region the design asked for.
    """
    cfg = cfg or SdpSolverConfig()
    h = np.asarray(h_star, dtype=float)
    n = lap.n
    if h.shape != (n, n):
        raise ValueError("filter matrix dimension does not match the graph")
    h = 0.5 * (h + h.T)
    eigs = np.linalg.eigvalsh(h)
    if eigs[0] <= 0.0 or eigs[-1] / eigs[0] > 1e12:
        raise IllConditionedError(
            f"filter matrix is not usable for recovery (eigenvalues in "
            f"[{eigs[0]:.3e}, {eigs[-1]:.3e}])"
        )
    om = cp.Variable((n, n), symmetric=True)
    eye = np.eye(n)
    support = lap.graph.adjacency != 0.0
    off_support = ~support & ~np.eye(n, dtype=bool)
    constraints = [om >> 0]
    if np.any(off_support):
        constraints.append(om[off_support] == 0)
    if diagonal_floor is not None:
        constraints.append(cp.diag(om) >= diagonal_floor)
    fitted = eye + cp.multiply(om, lap.matrix)
    objective = cp.sum_squares(h @ fitted - eye) + cp.sum_squares(fitted @ h - eye)
    prob = cp.Problem(cp.Minimize(objective), constraints)
    _run_solver(prob, cfg, "filter inversion")
    return 0.5 * (om.value + om.value.T)


def _corner_signals(
    problem: DesignProblem, extra_candidates: Sequence[ArrayLike]
) -> list[np.ndarray]:
    if not isinstance(problem.prior, Bounds):
        raise ValueError("min-max designs require a bounds prior")
    b = problem.prior.bounds
    candidates = [b.x_l, b.x_u]
    candidates.extend(signal_values(c) for c in extra_candidates)
    return [np.asarray(c, dtype=float) for c in candidates]


def design_minmax_prony(
    problem: DesignProblem,
    cfg: Optional[SdpSolverConfig] = None,
    extra_candidates: Sequence[ArrayLike] = (),
) -> DesignResult:
    """Worst-case modified-error design over the interval corner signals.

    The inner maximization is restricted to the two corners {x_l, x_u}
    (the worst case of the convex-in-x* cost sits on the boundary);
    callers holding other plausible extremal signals can add them through
    extra_candidates. Degenerate bounds reduce to the exact-prior design.
    """
    cfg = cfg or SdpSolverConfig()
    corners = _corner_signals(problem, extra_candidates)
    if not extra_candidates and np.array_equal(corners[0], corners[1]):
        exact = DesignProblem(
            lap=problem.lap,
            prior=ExactSignal(x=corners[0]),
            w0_star=problem.w0_star,
            noise=problem.noise,
        )
        return design_prony(exact, cfg)
    lap = problem.lap
    n = lap.n
    om = cp.Variable((n, n), symmetric=True)
    t = cp.Variable()
    constraints = [om >> 0, cp.diag(om) >= problem.w0_star]
    for x_c in corners:
        constraints.append(cp.sum_squares(cp.multiply(om, lap.matrix) @ x_c) <= t)
    prob = cp.Problem(cp.Minimize(t), constraints)
    stats = _run_solver(prob, cfg, "min-max modified-error design")
    omega_mat = 0.5 * (om.value + om.value.T)
    extraction = rank_one_extract(omega_mat)
    stats["primal_residual"] = float(np.sqrt(max(prob.value, 0.0)))
    return DesignResult(
        omega=Adaptive(w=extraction.omega),
        Omega=omega_mat,
        objective_value=float(prob.value),
        solver_stats=stats,
        rank1_quality=extraction.rank1_quality,
    )


def design_minmax_sdr(
    problem: DesignProblem,
    cfg: Optional[SdpSolverConfig] = None,
    extra_candidates: Sequence[ArrayLike] = (),
) -> DesignResult:
    """Worst-case true-error design over the interval corner signals.

    Same relaxation and recovery pipeline as design_sdr with the cost
    replaced by an epigraph over the per-corner expected squared errors.
    """
    cfg = cfg or SdpSolverConfig()
    corners = _corner_signals(problem, extra_candidates)
    cov = _noise_covariance(problem)
    if not extra_candidates and np.array_equal(corners[0], corners[1]):
        exact = DesignProblem(
            lap=problem.lap,
            prior=ExactSignal(x=corners[0]),
            w0_star=problem.w0_star,
            noise=problem.noise,
        )
        return design_sdr(exact, cfg)
    lap = problem.lap
    n = lap.n
    om = cp.Variable((n, n), symmetric=True)
    h = cp.Variable((n, n), symmetric=True)
    z = cp.Variable((n, n), symmetric=True)
    t = cp.Variable()
    eye = np.eye(n)
    constraints = [
        om >> 0,
        cp.bmat([[eye + cp.multiply(om, lap.matrix), eye], [eye, h]]) >> 0,
        cp.bmat([[z, h], [h, eye]]) >> 0,
        cp.diag(om) >= problem.w0_star,
    ]
    for x_c in corners:
        x_mat = np.outer(x_c, x_c)
        constraints.append(_true_error_cost_lifted(h, z, x_mat, cov) <= t)
    prob = cp.Problem(cp.Minimize(t), constraints)
    stats = _run_solver(prob, cfg, "min-max true-error design")
    h_star = 0.5 * (h.value + h.value.T)
    return _finish_sdr(problem, cfg, h_star, float(prob.value), stats)
