import numpy as np
import numpy.testing as npt
import pytest

from gsr.errors import DataFormatError, GraphConnectivityError
from gsr.graphs import (
    Adaptive,
    Graph,
    Invariant,
    erdos_renyi,
    format_edgelist,
    knn_geometric,
    laplacian,
    parse_coordinates,
    parse_edgelist,
    quadratic_form,
    shift_apply,
    shift_operator,
    weight_vector,
)


def path_graph(n: int) -> Graph:
    return Graph(n_nodes=n, edges=tuple((i, i + 1, 1.0) for i in range(n - 1)))


def random_adaptive(rng: np.random.Generator, n: int) -> Adaptive:
    return Adaptive(w=rng.uniform(-1.5, 1.5, n))


# ---------------------------------------------------------------- Graph type


def test_graph_rejects_self_loops():
    with pytest.raises(ValueError):
        Graph(n_nodes=3, edges=((1, 1, 1.0),))


def test_graph_rejects_duplicate_edges():
    with pytest.raises(ValueError):
        Graph(n_nodes=3, edges=((0, 1, 1.0), (0, 1, 2.0)))


def test_graph_rejects_nonpositive_weight():
    with pytest.raises(ValueError):
        Graph(n_nodes=2, edges=((0, 1, 0.0),))


def test_adjacency_symmetric_nonnegative_zero_diagonal():
    g = erdos_renyi(10, 0.5, rng_seed=1)
    a = g.adjacency
    npt.assert_array_equal(a, a.T)
    assert (a >= 0).all()
    npt.assert_array_equal(np.diag(a), np.zeros(10))


# ------------------------------------------------------------- erdos_renyi


def test_er_p1_two_nodes_single_edge():
    g = erdos_renyi(2, 1.0, rng_seed=123)
    assert g.edges == ((0, 1, 1.0),)


def test_er_p0_disconnected_raises():
    with pytest.raises(GraphConnectivityError):
        erdos_renyi(5, 0.0, rng_seed=9)


def test_er_edge_count_concentrates():
    # 50 nodes, p = 0.5: 1225 pairs, expected 612 edges
    g = erdos_renyi(50, 0.5, rng_seed=7)
    assert g.is_connected()
    assert 400 <= g.n_edges <= 800


def test_er_deterministic_under_seed():
    a = erdos_renyi(20, 0.3, rng_seed=5)
    b = erdos_renyi(20, 0.3, rng_seed=5)
    assert a.edges == b.edges


# ------------------------------------------------------------ knn_geometric


def test_knn_collinear_points_form_path():
    # middle node ties between its two neighbors, broken by lowest index
    coords = np.array([[0.0, 0.0], [1.0, 0.0], [2.0, 0.0]])
    g = knn_geometric(coords, k=1, kernel_scale=5.0)
    assert [(i, j) for i, j, _ in g.edges] == [(0, 1), (1, 2)]


def test_knn_two_points_weight():
    coords = np.array([[0.0, 0.0], [1.0, 0.0]])
    g = knn_geometric(coords, k=1, kernel_scale=5.0)
    ((i, j, w),) = g.edges
    assert (i, j) == (0, 1)
    npt.assert_allclose(w, np.exp(-5.0))


def test_knn_degrees_at_least_k():
    rng = np.random.default_rng(2)
    coords = rng.uniform(0, 1, (10, 2))
    g = knn_geometric(coords, k=3, kernel_scale=5.0)
    degrees = g.adjacency.astype(bool).sum(axis=0)
    assert (degrees >= 3).all()
    # symmetrization only adds edges beyond each node's own k selections
    d2 = ((coords[:, None, :] - coords[None, :, :]) ** 2).sum(-1)
    for i in range(10):
        order = np.lexsort((np.arange(10), d2[i]))
        own = [j for j in order if j != i][:3]
        for j in own:
            assert g.adjacency[i, j] > 0


def test_knn_duplicate_coordinates_error():
    coords = np.array([[0.0, 0.0], [0.0, 0.0], [1.0, 1.0]])
    with pytest.raises(DataFormatError):
        knn_geometric(coords, k=1, kernel_scale=5.0)


# ---------------------------------------------------------------- laplacian


def test_laplacian_p2():
    lap = laplacian(path_graph(2))
    npt.assert_array_equal(lap.matrix, [[1.0, -1.0], [-1.0, 1.0]])


def test_laplacian_triangle():
    g = Graph(n_nodes=3, edges=((0, 1, 1.0), (0, 2, 1.0), (1, 2, 1.0)))
    lap = laplacian(g)
    npt.assert_array_equal(np.diag(lap.matrix), [2.0, 2.0, 2.0])
    assert lap.matrix[0, 1] == -1.0
    npt.assert_allclose(lap.lambda_max, 3.0, rtol=1e-12)


def test_laplacian_row_sums_zero_and_psd():
    g = erdos_renyi(30, 0.3, rng_seed=3)
    lap = laplacian(g)
    npt.assert_allclose(lap.matrix.sum(axis=1), 0.0, atol=1e-10 * lap.lambda_max)
    eigs = np.linalg.eigvalsh(lap.matrix)
    assert eigs[0] >= -1e-10 * lap.lambda_max
    assert abs(eigs[0]) <= 1e-10 * lap.lambda_max  # lambda_1 = 0
    assert lap.lambda_2 > 0


def test_lambda2_of_path_matches_closed_form():
    # path P3 eigenvalues are 0, 1, 3
    lap = laplacian(path_graph(3))
    npt.assert_allclose(lap.lambda_2, 1.0, rtol=1e-12)
    npt.assert_allclose(lap.lambda_max, 3.0, rtol=1e-12)


# ------------------------------------------------------------ shift operator


def test_shift_operator_p2_hand_expansion():
    lap = laplacian(path_graph(2))
    s = shift_operator(lap, Adaptive(w=np.array([2.0, 3.0])))
    npt.assert_allclose(s, [[4.0, -6.0], [-6.0, 9.0]])


def test_shift_operator_zero_weights():
    lap = laplacian(path_graph(4))
    npt.assert_array_equal(shift_operator(lap, Adaptive(w=np.zeros(4))), np.zeros((4, 4)))


def test_shift_operator_unit_weights_is_laplacian():
    lap = laplacian(erdos_renyi(8, 0.6, rng_seed=4))
    npt.assert_allclose(shift_operator(lap, Adaptive(w=np.ones(8))), lap.matrix)


def test_shift_operator_invariant_is_scaled_laplacian():
    lap = laplacian(erdos_renyi(8, 0.6, rng_seed=4))
    npt.assert_allclose(shift_operator(lap, Invariant(w0=0.7)), 0.7 * lap.matrix)


def test_shift_operator_sqrt_parameterization_matches_invariant():
    lap = laplacian(erdos_renyi(9, 0.5, rng_seed=6))
    # exact when sqrt(w0) is representable
    s_inv = shift_operator(lap, Invariant(w0=0.25))
    s_ada = shift_operator(lap, Adaptive(w=np.full(9, 0.5)))
    npt.assert_array_equal(s_inv, s_ada)
    # generic w0: sqrt round-trip costs at most a few ulp
    s_inv = shift_operator(lap, Invariant(w0=0.37))
    s_ada = shift_operator(lap, Adaptive(w=np.full(9, np.sqrt(0.37))))
    npt.assert_allclose(s_ada, s_inv, rtol=5e-16)


def test_shift_operator_dimension_mismatch():
    lap = laplacian(path_graph(3))
    with pytest.raises(ValueError):
        shift_operator(lap, Adaptive(w=np.ones(4)))


@pytest.mark.parametrize("seed", range(5))
def test_shift_operator_psd_and_support(seed):
    rng = np.random.default_rng(seed)
    g = erdos_renyi(12, 0.4, rng_seed=40 + seed)
    lap = laplacian(g)
    w = random_adaptive(rng, 12)
    s = shift_operator(lap, w)
    eigs = np.linalg.eigvalsh(s)
    smax = max(eigs[-1], 1e-30)
    assert eigs[0] >= -1e-10 * smax
    # support(S) inside support(L)
    assert not np.any((s != 0) & (lap.matrix == 0))


def test_shift_apply_matches_dense():
    rng = np.random.default_rng(11)
    g = erdos_renyi(15, 0.4, rng_seed=17)
    lap = laplacian(g)
    w = rng.uniform(-1, 1, 15)
    x = rng.standard_normal(15)
    dense = shift_operator(lap, Adaptive(w=w)) @ x
    npt.assert_allclose(shift_apply(lap, w, x), dense, atol=1e-12)


# ------------------------------------------------------------ quadratic form


def test_quadratic_form_constant_signal_zero():
    lap = laplacian(erdos_renyi(10, 0.5, rng_seed=8))
    assert quadratic_form(lap, np.full(10, 3.0), Adaptive(w=np.ones(10))) == pytest.approx(0.0)


def test_quadratic_form_p2_unit():
    lap = laplacian(path_graph(2))
    assert quadratic_form(lap, np.array([1.0, 0.0]), Invariant(w0=1.0)) == pytest.approx(1.0)


def test_quadratic_form_p2_weighted():
    # edge sum: A_01 (w_0 x_0 - w_1 x_1)^2 = (2 - 1)^2 = 1
    lap = laplacian(path_graph(2))
    val = quadratic_form(lap, np.array([1.0, 1.0]), Adaptive(w=np.array([2.0, 1.0])))
    assert val == pytest.approx(1.0)


@pytest.mark.parametrize("seed", range(8))
def test_quadratic_form_edge_sum_matches_matrix_form(seed):
    rng = np.random.default_rng(seed)
    g = erdos_renyi(14, 0.5, rng_seed=70 + seed)
    lap = laplacian(g)
    w = random_adaptive(rng, 14)
    x = rng.standard_normal(14)
    s = shift_operator(lap, w)
    expected = float(x @ s @ x)
    got = quadratic_form(lap, x, w)
    npt.assert_allclose(got, expected, rtol=1e-10, atol=1e-12)


def test_hadamard_eigenvalue_bound():
    # lambda_max(w w^T (*) L) <= lambda_max(L) * max w_i^2, randomized
    rng = np.random.default_rng(99)
    for trial in range(100):
        n = int(rng.integers(5, 15))
        g = erdos_renyi(n, 0.5, rng_seed=1000 + trial)
        lap = laplacian(g)
        w = Adaptive(w=rng.uniform(-2, 2, n))
        s = shift_operator(lap, w)
        smax = np.linalg.eigvalsh(s)[-1]
        bound = lap.lambda_max * np.max(w.w**2)
        assert smax <= bound * (1 + 1e-8)


def test_weight_vector_forms():
    npt.assert_allclose(weight_vector(Invariant(w0=4.0), 3), np.full(3, 2.0))
    w = np.array([1.0, -2.0])
    npt.assert_array_equal(weight_vector(Adaptive(w=w), 2), w)


def test_invariant_rejects_negative():
    with pytest.raises(ValueError):
        Invariant(w0=-0.5)


# --------------------------------------------------------------- edge lists


def test_edgelist_round_trip():
    g = erdos_renyi(9, 0.5, rng_seed=21)
    text = format_edgelist(g)
    g2 = parse_edgelist(text)
    assert g2.n_nodes == g.n_nodes
    assert g2.edges == g.edges


def test_parse_edgelist_swaps_reversed_pairs():
    g = parse_edgelist("n_nodes=3\n2 0 1.5\n0 1 2.0\n")
    assert g.edges == ((0, 1, 2.0), (0, 2, 1.5))


def test_parse_edgelist_rejects_bad_header():
    with pytest.raises(DataFormatError):
        parse_edgelist("nodes=3\n0 1 1.0\n")


def test_parse_edgelist_rejects_out_of_range():
    with pytest.raises(DataFormatError):
        parse_edgelist("n_nodes=2\n0 2 1.0\n")


def test_parse_coordinates():
    ids, coords = parse_coordinates("a 0.0 1.0\nb 2.0 3.0\n")
    assert ids == ["a", "b"]
    npt.assert_array_equal(coords, [[0.0, 1.0], [2.0, 3.0]])
