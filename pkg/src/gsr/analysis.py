"""Bias/variance/MSE analysis and the weight-dominance conditions.

The estimate xhat = H y with H = (I + S(w))^(-1) has

    bias       (H - I) x*
    variance   tr(H^2 Sigma)
    mse        ||bias||^2 + variance

and the per-node weighting dominates the scalar one whenever the
conditions checked below hold: w0 <= w_i^2 everywhere guarantees a smaller
variance, and together with

    2 gamma <= 1/(1 + w0 lmax) + 1/(1 + max w_i^2 lmax)

a smaller MSE as well, where gamma = rho / (1 + rho) and rho is the
nonzero eigenvalue of x* x*^T Sigma^(-1). The simpler cap
max w_i^2 <= 1/(rho lmax) implies the second condition.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .errors import GraphConnectivityError
from .graphs import Laplacian, NodeWeights
from .signals import ArrayLike, NoiseModel, signal_values

__all__ = [
    "ErrorDecomposition",
    "TheoremQuantities",
    "decompose_error",
    "theorem_quantities",
    "check_lemma1",
    "check_theorem1",
    "check_corollary1",
    "optimal_w0",
]


@dataclass(frozen=True)
class ErrorDecomposition:
    bias_sq: float
    variance: float
    mse: float


@dataclass(frozen=True)
class TheoremQuantities:
    """Scalars entering the dominance conditions."""

    rho: float
    gamma: float
    lambda_max_l: float


def decompose_error(
    lap: Laplacian, w: NodeWeights, x_true: ArrayLike, noise: NoiseModel
) -> ErrorDecomposition:
    """Exact error decomposition of the full-mask estimator."""
    from .estimators import filter_matrix

    x = signal_values(x_true)
    if x.shape[0] != lap.n or noise.n != lap.n:
        raise ValueError("signal/covariance dimensions must match the graph")
    h = filter_matrix(lap, w)
    bias = (h - np.eye(lap.n)) @ x
    bias_sq = float(bias @ bias)
    variance = float(np.trace(h @ h @ noise.covariance))
    return ErrorDecomposition(bias_sq=bias_sq, variance=variance, mse=bias_sq + variance)


def theorem_quantities(x_true: ArrayLike, noise: NoiseModel, lap: Laplacian) -> TheoremQuantities:
    """rho = x*^T Sigma^(-1) x* (the nonzero eigenvalue of x* x*^T Sigma^(-1))
    and gamma = rho / (1 + rho), computed as scalars for robustness."""
    x = signal_values(x_true)
    if float(x @ x) == 0.0:
        raise ValueError("x* must be nonzero")
    try:
        sigma_inv_x = scipy.linalg.solve(noise.covariance, x, assume_a="pos")
    except (scipy.linalg.LinAlgError, ValueError) as exc:
        raise ValueError("noise covariance must be invertible") from exc
    rho = float(x @ sigma_inv_x)
    return TheoremQuantities(rho=rho, gamma=rho / (1.0 + rho), lambda_max_l=lap.lambda_max)


def check_lemma1(w0: float, w: np.ndarray) -> bool:
    """w0 <= w_i^2 for every node. Exact float comparison; the property
    tests gated by this carry the tolerances."""
    w = np.asarray(w, dtype=float)
    return bool(np.all(w0 <= w**2))


def check_theorem1(w0: float, w: np.ndarray, tq: TheoremQuantities) -> bool:
    """Both sufficient conditions for mse(w) <= mse(w0)."""
    w = np.asarray(w, dtype=float)
    if not check_lemma1(w0, w):
        return False
    lmax = tq.lambda_max_l
    rhs = 1.0 / (1.0 + w0 * lmax) + 1.0 / (1.0 + float(np.max(w**2)) * lmax)
    return bool(2.0 * tq.gamma <= rhs)


def check_corollary1(w: np.ndarray, tq: TheoremQuantities) -> bool:
    """max w_i^2 <= 1/(rho lmax); a rho of zero makes the cap vacuous."""
    w = np.asarray(w, dtype=float)
    denom = tq.rho * tq.lambda_max_l
    if denom <= 0.0:
        return True
    return bool(float(np.max(w**2)) <= 1.0 / denom)


def optimal_w0(lap: Laplacian, snr_db: float, multiplier: float = 1.0) -> float:
    """Order-rule scalar weight sqrt(theta / (lambda_2 lambda_max)) with
    theta = sqrt(1/SNR); the hidden constant is exposed as a multiplier."""
    if not lap.graph.is_connected() or lap.lambda_2 <= 0.0:
        raise GraphConnectivityError("optimal w0 requires a connected graph (lambda_2 > 0)")
    snr_linear = 10.0 ** (snr_db / 10.0)
    theta = np.sqrt(1.0 / snr_linear)
    return float(multiplier * np.sqrt(theta / (lap.lambda_2 * lap.lambda_max)))
