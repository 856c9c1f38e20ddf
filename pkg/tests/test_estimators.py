import numpy as np
import numpy.testing as npt
import pytest
import scipy.linalg

from gsr.errors import SingularSystemError
from gsr.estimators import (
    Method,
    SolveOptions,
    filter_matrix,
    solve,
    solve_cg,
    solve_direct,
    solve_distributed,
    solve_interpolation,
    solve_krr_diffusion,
)
from gsr.graphs import Adaptive, Graph, Invariant, erdos_renyi, laplacian, shift_apply, shift_operator
from gsr.signals import Observation


def path_lap(n: int):
    return laplacian(Graph(n_nodes=n, edges=tuple((i, i + 1, 1.0) for i in range(n - 1))))


def random_instance(seed: int, n: int = 30):
    rng = np.random.default_rng(seed)
    lap = laplacian(erdos_renyi(n, 0.4, rng_seed=seed))
    w = Adaptive(w=rng.uniform(-1.2, 1.2, n))
    y = rng.standard_normal(n)
    return lap, w, Observation.full(y)


def scale_to_norm(lap, w: np.ndarray, target: float) -> Adaptive:
    """Rescale weights so the shift operator has the requested spectral norm."""
    s = shift_operator(lap, Adaptive(w=w))
    norm = np.linalg.eigvalsh(s)[-1]
    return Adaptive(w=w * np.sqrt(target / norm))


# ------------------------------------------------------------- solve_direct


def test_direct_zero_weights_identity():
    lap, _, obs = random_instance(0, 12)
    rep = solve_direct(lap, Adaptive(w=np.zeros(12)), obs)
    npt.assert_allclose(rep.estimate, obs.y, atol=1e-14)


def test_direct_p2_hand_inverse():
    # (I + L) x = y with y = [1, 0]: x = [2/3, 1/3]
    rep = solve_direct(path_lap(2), Invariant(w0=1.0), Observation.full(np.array([1.0, 0.0])))
    npt.assert_allclose(rep.estimate, [2.0 / 3.0, 1.0 / 3.0], rtol=1e-12)


def test_direct_requires_full_mask():
    lap = path_lap(3)
    obs = Observation(y=np.ones(3), mask=np.array([0, 1]))
    with pytest.raises(ValueError):
        solve_direct(lap, Invariant(w0=1.0), obs)


def test_direct_dimension_mismatch():
    lap = path_lap(3)
    with pytest.raises(ValueError):
        solve_direct(lap, Adaptive(w=np.ones(4)), Observation.full(np.ones(3)))


@pytest.mark.parametrize("seed", range(5))
def test_direct_sqrt_reduction(seed):
    lap, _, obs = random_instance(seed, 15)
    w0 = 0.8
    a = solve_direct(lap, Invariant(w0=w0), obs).estimate
    b = solve_direct(lap, Adaptive(w=np.full(15, np.sqrt(w0))), obs).estimate
    npt.assert_allclose(b, a, rtol=1e-12)


# ----------------------------------------------------------------- solve_cg


def test_cg_zero_weights_single_iteration():
    lap, _, obs = random_instance(1, 10)
    rep = solve_cg(lap, Adaptive(w=np.zeros(10)), obs)
    assert rep.iterations_used == 1
    npt.assert_allclose(rep.estimate, obs.y, atol=1e-12)


@pytest.mark.parametrize("seed", range(5))
def test_cg_matches_direct(seed):
    lap, w, obs = random_instance(seed)
    direct = solve_direct(lap, w, obs).estimate
    rep = solve_cg(lap, w, obs, SolveOptions(cg_tolerance=1e-10))
    npt.assert_allclose(rep.estimate, direct, rtol=1e-8)


def test_cg_warm_start_at_solution_stops_immediately():
    # Build y so that x solves (I + S) x = y in exact float arithmetic: then
    # the warm-started residual is bitwise zero and no iteration is needed.
    lap, w, _ = random_instance(2)
    rng = np.random.default_rng(12)
    x = rng.normal(size=lap.n)
    y = x + shift_apply(lap, w.w, x)
    rep = solve_cg(lap, w, Observation.full(y), SolveOptions(warm_start=x))
    assert rep.iterations_used == 0
    npt.assert_allclose(rep.estimate, x, rtol=0, atol=0)


def test_cg_respects_iteration_cap():
    lap, w, obs = random_instance(3)
    rep = solve_cg(lap, w, obs, SolveOptions(cg_tolerance=1e-16, max_iterations=2))
    assert rep.iterations_used == 2
    assert rep.final_residual > 0


def test_cg_residual_reported():
    lap, w, obs = random_instance(4)
    rep = solve_cg(lap, w, obs, SolveOptions(cg_tolerance=1e-10))
    system = np.eye(30) + shift_operator(lap, w)
    residual = np.linalg.norm(obs.y - system @ rep.estimate)
    npt.assert_allclose(rep.final_residual, residual, rtol=1e-6, atol=1e-12)


# --------------------------------------------------------- solve_distributed


def test_distributed_zero_weights():
    lap, _, obs = random_instance(5, 10)
    rep = solve_distributed(lap, Adaptive(w=np.zeros(10)), obs, SolveOptions(max_iterations=1))
    npt.assert_allclose(rep.estimate, obs.y, atol=1e-14)
    assert not rep.divergence_warning
    assert rep.spectral_norm_bound == pytest.approx(0.0, abs=1e-12)


def test_distributed_geometric_decay():
    rng = np.random.default_rng(6)
    lap, _, obs = random_instance(6, 20)
    w = scale_to_norm(lap, rng.uniform(0.3, 1.0, 20), 0.5)
    direct = solve_direct(lap, w, obs).estimate
    errs = {}
    for t in (5, 10, 20):
        rep = solve_distributed(lap, w, obs, SolveOptions(max_iterations=t))
        assert rep.spectral_norm_bound == pytest.approx(0.5, rel=1e-9)
        errs[t] = np.linalg.norm(rep.estimate - direct)
    # contraction factor 0.5 per step
    assert errs[10] / errs[5] <= 0.5**5 * 1.1
    assert errs[20] / errs[10] <= 0.5**10 * 1.1


def test_distributed_divergence_flag():
    rng = np.random.default_rng(7)
    lap, _, obs = random_instance(7, 15)
    w = scale_to_norm(lap, rng.uniform(0.3, 1.0, 15), 1.2)
    rep = solve_distributed(lap, w, obs, SolveOptions(max_iterations=10))
    assert rep.divergence_warning
    assert rep.spectral_norm_bound == pytest.approx(1.2, rel=1e-9)


# ------------------------------------------------------- solve_interpolation


def test_interpolation_full_mask_equals_direct():
    lap, w, obs = random_instance(8, 15)
    a = solve_interpolation(lap, w, obs).estimate
    b = solve_direct(lap, w, obs).estimate
    npt.assert_allclose(a, b, rtol=1e-10)


def test_interpolation_p2_copies_observed_value():
    # solve [[2, -1], [-1, 1]] x = [1, 0]: smooth extension x = [1, 1]
    obs = Observation(y=np.array([1.0, 123.0]), mask=np.array([0]))
    rep = solve_interpolation(path_lap(2), Invariant(w0=1.0), obs)
    npt.assert_allclose(rep.estimate, [1.0, 1.0], rtol=1e-12)


def test_interpolation_zero_weights_partial_mask_singular():
    obs = Observation(y=np.array([1.0, 0.0]), mask=np.array([0]))
    with pytest.raises(SingularSystemError):
        solve_interpolation(path_lap(2), Invariant(w0=0.0), obs)


def test_interpolation_disconnected_unobserved_component_singular():
    # two components; nothing observed in the second one
    g = Graph(n_nodes=4, edges=((0, 1, 1.0), (2, 3, 1.0)))
    obs = Observation(y=np.ones(4), mask=np.array([0, 1]))
    with pytest.raises(SingularSystemError):
        solve_interpolation(laplacian(g), Invariant(w0=1.0), obs)


# ------------------------------------------------------- solve_krr_diffusion


def test_krr_identity_kernel_limit():
    y = np.array([1.0, 2.0, -0.5])
    rep = solve_krr_diffusion(path_lap(3), Observation.full(y), sigma2_krr=0.0, mu_krr=1e-2)
    npt.assert_allclose(rep.estimate, y / (1.0 + 3 * 1e-2), rtol=1e-12)


def test_krr_matches_expm_oracle():
    lap = path_lap(5)
    rng = np.random.default_rng(9)
    y = rng.standard_normal(5)
    obs = Observation(y=y, mask=np.array([0, 2, 3]))
    sigma2, mu = 1.0, 1e-4
    kernel = scipy.linalg.expm(-sigma2 * lap.matrix / 2.0)
    k_mm = kernel[np.ix_(obs.mask, obs.mask)]
    expected = kernel[:, obs.mask] @ np.linalg.solve(k_mm + 5 * mu * np.eye(3), y[obs.mask])
    rep = solve_krr_diffusion(lap, obs, sigma2_krr=sigma2, mu_krr=mu)
    npt.assert_allclose(rep.estimate, expected, rtol=1e-8)


def test_krr_default_parameters_full_mask():
    lap, _, obs = random_instance(10, 12)
    rep = solve_krr_diffusion(lap, obs)
    assert rep.estimate.shape == (12,)
    assert np.isfinite(rep.estimate).all()


# ------------------------------------------------------- filter and dispatch


@pytest.mark.parametrize("seed", range(5))
def test_filter_matrix_symmetric_psd_spectrum_in_unit_interval(seed):
    lap, w, _ = random_instance(seed, 18)
    h = filter_matrix(lap, w)
    npt.assert_allclose(h, h.T, atol=1e-10)
    eigs = np.linalg.eigvalsh(0.5 * (h + h.T))
    assert eigs[0] > 0
    assert eigs[-1] <= 1 + 1e-12


@pytest.mark.parametrize("seed", range(5))
def test_energy_non_expansion(seed):
    lap, w, obs = random_instance(seed, 18)
    est = solve_direct(lap, w, obs).estimate
    assert np.linalg.norm(est) <= np.linalg.norm(obs.y) * (1 + 1e-12)


@pytest.mark.parametrize("seed", range(3))
def test_three_solver_agreement(seed):
    rng = np.random.default_rng(100 + seed)
    lap, _, obs = random_instance(100 + seed, 30)
    w = scale_to_norm(lap, rng.uniform(0.2, 1.0, 30), 0.8)
    direct = solve_direct(lap, w, obs).estimate
    cg = solve_cg(lap, w, obs, SolveOptions(cg_tolerance=1e-12)).estimate
    dist = solve_distributed(lap, w, obs, SolveOptions(max_iterations=500)).estimate
    scale = np.linalg.norm(direct)
    assert np.linalg.norm(cg - direct) / scale <= 1e-6
    assert np.linalg.norm(dist - direct) / scale <= 1e-6
    assert np.linalg.norm(dist - cg) / scale <= 1e-6


def test_solve_dispatcher_routes_by_method():
    lap, w, obs = random_instance(11, 12)
    a = solve(lap, w, obs, SolveOptions(method=Method.DIRECT)).estimate
    b = solve(lap, w, obs, SolveOptions(method=Method.CONJUGATE_GRADIENT, cg_tolerance=1e-12)).estimate
    npt.assert_allclose(b, a, rtol=1e-9)


def test_solve_options_validation():
    with pytest.raises(ValueError):
        SolveOptions(cg_tolerance=0.0)
    with pytest.raises(ValueError):
        SolveOptions(max_iterations=0)
