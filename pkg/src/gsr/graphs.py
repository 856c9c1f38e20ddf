"""Graphs, Laplacians, and the node-adaptive shift operator.

The central object is the combinatorial Laplacian L = diag(A1) - A of an
undirected weighted graph, together with the per-node weighting

    S(w) = diag(w) L diag(w) = w w^T (*) L,

where (*) is the Hadamard product. S(w) is positive semi-definite for any
real weight vector w and shares the sparsity pattern of L, which is what
makes the weighted regularizer cheap to apply.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Sequence, Union

import numpy as np
import scipy.sparse as sp
import scipy.sparse.csgraph as csgraph

from .errors import DataFormatError, GraphConnectivityError

__all__ = [
    "Graph",
    "Laplacian",
    "NodeWeights",
    "Invariant",
    "Adaptive",
    "erdos_renyi",
    "knn_geometric",
    "laplacian",
    "shift_operator",
    "shift_apply",
    "quadratic_form",
    "parse_edgelist",
    "format_edgelist",
    "parse_coordinates",
]

# Graphs above this size skip the dense eigendecomposition for spectral
# quantities and fall back to iterative estimates.
_DENSE_EIG_LIMIT = 2000


@dataclass(frozen=True)
class Graph:
    """Undirected weighted graph with no self-loops.

    Edges are stored once as (i, j, weight) with i < j and weight > 0.
    """

    n_nodes: int
    edges: tuple[tuple[int, int, float], ...]

    def __post_init__(self) -> None:
        if self.n_nodes < 1:
            raise ValueError("graph needs at least one node")
        seen = set()
        for i, j, w in self.edges:
            if i == j:
                raise ValueError(f"self-loop at node {i}")
            if not (0 <= i < j < self.n_nodes):
                raise ValueError(f"edge ({i}, {j}) out of range or not i < j")
            if w <= 0:
                raise ValueError(f"edge ({i}, {j}) has non-positive weight {w}")
            if (i, j) in seen:
                raise ValueError(f"duplicate edge ({i}, {j})")
            seen.add((i, j))
        # canonical order, so equal graphs compare equal however built
        object.__setattr__(self, "edges", tuple(sorted(self.edges)))

    @property
    def n_edges(self) -> int:
        return len(self.edges)

    @cached_property
    def adjacency(self) -> np.ndarray:
        """Dense symmetric adjacency matrix with zero diagonal."""
        a = np.zeros((self.n_nodes, self.n_nodes))
        for i, j, w in self.edges:
            a[i, j] = w
            a[j, i] = w
        return a

    @cached_property
    def edge_arrays(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Edge endpoints and weights as parallel arrays (for edge sums)."""
        if not self.edges:
            z = np.zeros(0, dtype=int)
            return z, z.copy(), np.zeros(0)
        ii, jj, ww = zip(*self.edges)
        return np.asarray(ii), np.asarray(jj), np.asarray(ww, dtype=float)

    def is_connected(self) -> bool:
        if self.n_nodes == 1:
            return True
        ii, jj, ww = self.edge_arrays
        a = sp.coo_matrix((ww, (ii, jj)), shape=(self.n_nodes, self.n_nodes))
        n_comp, _ = csgraph.connected_components(a, directed=False)
        return n_comp == 1


@dataclass(frozen=True)
class Laplacian:
    """Combinatorial Laplacian L = diag(A1) - A with cached spectral extremes."""

    matrix: np.ndarray
    graph: Graph = field(repr=False)

    @property
    def n(self) -> int:
        return self.matrix.shape[0]

    @cached_property
    def sparse(self) -> sp.csr_matrix:
        return sp.csr_matrix(self.matrix)

    @cached_property
    def _eigenvalues(self) -> np.ndarray:
        # Ascending; only computed for graphs small enough for dense eigh.
        return np.linalg.eigvalsh(self.matrix)

    @cached_property
    def eigendecomposition(self) -> tuple[np.ndarray, np.ndarray]:
        """(eigenvalues ascending, eigenvectors as columns), dense.

        Each eigenvector's first nonzero entry is made positive, so the
        graph Fourier basis (and everything synthesized from it) is
        deterministic across runs and platforms.
        """
        lam, u = np.linalg.eigh(self.matrix)
        u = u.copy()
        for c in range(u.shape[1]):
            col = u[:, c]
            nz = np.flatnonzero(np.abs(col) > 1e-12)
            if nz.size and col[nz[0]] < 0:
                u[:, c] = -col
        return lam, u

    @cached_property
    def lambda_max(self) -> float:
        if self.n <= _DENSE_EIG_LIMIT:
            return float(self._eigenvalues[-1])
        return _power_iteration_norm(self.sparse)

    @cached_property
    def lambda_2(self) -> float:
        """Smallest nonzero eigenvalue (algebraic connectivity for connected graphs)."""
        if self.n <= _DENSE_EIG_LIMIT:
            lam = self._eigenvalues
        else:
            lam = np.sort(
                sp.linalg.eigsh(self.sparse, k=2, which="SM", return_eigenvectors=False)
            )
        # Entries below this are the numerical zero mode(s).
        tol = 1e-10 * max(self.lambda_max, 1.0)
        nonzero = lam[lam > tol]
        if nonzero.size == 0:
            return 0.0
        return float(nonzero[0])


def _power_iteration_norm(m: sp.spmatrix, tol: float = 1e-10, max_iter: int = 5000) -> float:
    """Largest eigenvalue of a symmetric PSD sparse matrix by power iteration."""
    rng = np.random.default_rng(0)
    v = rng.standard_normal(m.shape[0])
    v /= np.linalg.norm(v)
    lam = 0.0
    for _ in range(max_iter):
        w = m @ v
        norm = np.linalg.norm(w)
        if norm == 0.0:
            return 0.0
        v_new = w / norm
        lam_new = float(v_new @ (m @ v_new))
        if abs(lam_new - lam) <= tol * max(abs(lam_new), 1.0):
            return lam_new
        lam, v = lam_new, v_new
    return lam


class NodeWeights:
    """Regularizer weights: a single scalar or one weight per node."""

    __slots__ = ()


@dataclass(frozen=True)
class Invariant(NodeWeights):
    """Node-invariant weight: the penalty is w0 * x^T L x."""

    w0: float

    def __post_init__(self) -> None:
        if self.w0 < 0:
            raise ValueError("w0 must be nonnegative")


@dataclass(frozen=True)
class Adaptive(NodeWeights):
    """Node-adaptive weights: the penalty is x^T S(w) x.

    The sign of each entry is unrestricted; S(w) depends on w only through
    w w^T, so w and -w are equivalent.
    """

    w: np.ndarray

    def __post_init__(self) -> None:
        arr = np.atleast_1d(np.asarray(self.w, dtype=float))
        if arr.ndim != 1:
            raise ValueError("adaptive weights must be a vector")
        if not np.all(np.isfinite(arr)):
            raise ValueError("adaptive weights must be finite")
        object.__setattr__(self, "w", arr)


def weight_vector(w: NodeWeights, n: int) -> np.ndarray:
    """Per-node weight vector realizing S(w); sqrt(w0)*1 for the invariant case."""
    if isinstance(w, Invariant):
        return np.full(n, np.sqrt(w.w0))
    if isinstance(w, Adaptive):
        if w.w.shape[0] != n:
            raise ValueError(f"weight vector has length {w.w.shape[0]}, graph has {n} nodes")
        return w.w
    raise TypeError(f"unsupported weights type {type(w).__name__}")


def erdos_renyi(n: int, p: float, rng_seed: int, max_tries: int = 100) -> Graph:
    """Connected Erdos-Renyi graph G(n, p) with unit edge weights.

    Disconnected draws are rejected and regenerated (the downstream weight
    rule divides by the algebraic connectivity). Deterministic per seed.
    """
    if n < 2:
        raise ValueError("n must be at least 2")
    if not 0 <= p <= 1:
        raise ValueError("p must be a probability")
    rng = np.random.default_rng(rng_seed)
    iu, ju = np.triu_indices(n, k=1)
    for _ in range(max_tries):
        keep = rng.random(iu.size) < p
        edges = tuple(
            (int(i), int(j), 1.0) for i, j in zip(iu[keep], ju[keep])
        )
        g = Graph(n_nodes=n, edges=edges)
        if g.is_connected():
            return g
    raise GraphConnectivityError(
        f"no connected graph after {max_tries} tries (n={n}, p={p})"
    )


def knn_geometric(
    coords: Union[np.ndarray, Sequence[Sequence[float]]],
    k: int,
    kernel_scale: float,
) -> Graph:
    """Symmetrized k-nearest-neighbor graph with Gaussian kernel weights.

    An edge is kept if either endpoint selects the other; its weight is
    exp(-kernel_scale * d(i,j)^2) with d the Euclidean distance. Neighbor
    ties are broken by lowest node index.
    """
    pts = np.asarray(coords, dtype=float)
    if pts.ndim != 2:
        raise ValueError("coords must be an (n, d) array")
    n = pts.shape[0]
    if not 1 <= k < n:
        raise ValueError(f"k={k} must satisfy 1 <= k < n={n}")
    diff = pts[:, None, :] - pts[None, :, :]
    dist2 = np.einsum("ijk,ijk->ij", diff, diff)
    off_diag = ~np.eye(n, dtype=bool)
    if np.any(dist2[off_diag] == 0.0):
        raise DataFormatError("duplicate coordinates: zero pairwise distance")
    edge_set = set()
    idx = np.arange(n)
    for i in range(n):
        # Sort others by (distance, index): stable ascending with the tie rule.
        order = np.lexsort((idx, dist2[i]))
        order = order[order != i]
        for j in order[:k]:
            a, b = (i, int(j)) if i < j else (int(j), i)
            edge_set.add((a, b))
    edges = tuple(
        (i, j, float(np.exp(-kernel_scale * dist2[i, j])))
        for i, j in sorted(edge_set)
    )
    return Graph(n_nodes=n, edges=edges)


def laplacian(g: Graph) -> Laplacian:
    """Combinatorial Laplacian of a graph."""
    a = g.adjacency
    lap = np.diag(a.sum(axis=1)) - a
    return Laplacian(matrix=lap, graph=g)


def shift_operator(lap: Laplacian, w: NodeWeights) -> np.ndarray:
    """Dense S(w) = diag(w) L diag(w); exactly w0 * L in the invariant case."""
    if isinstance(w, Invariant):
        return w.w0 * lap.matrix
    vec = weight_vector(w, lap.n)
    return np.outer(vec, vec) * lap.matrix


def shift_apply(lap: Laplacian, w_vec: np.ndarray, x: np.ndarray) -> np.ndarray:
    """Apply S(w) to a vector through the edge-local form.

    Computes w * (L (w * x)) with the sparse Laplacian, which realizes
    x_i -> w_i * sum_j A_ij (w_i x_i - w_j x_j) at cost linear in the
    number of edges.
    """
    return w_vec * (lap.sparse @ (w_vec * x))


def quadratic_form(lap: Laplacian, x: np.ndarray, w: NodeWeights) -> float:
    """x^T S(w) x evaluated by the edge sum (1/2) sum A_ij (w_i x_i - w_j x_j)^2.

    The edge-sum form never touches the dense operator, and doubles as an
    independent oracle that the two representations of S(w) agree.
    """
    x = np.asarray(x, dtype=float)
    if x.shape[0] != lap.n:
        raise ValueError(f"signal has length {x.shape[0]}, graph has {lap.n} nodes")
    vec = weight_vector(w, lap.n)
    ii, jj, ww = lap.graph.edge_arrays
    z = vec * x
    # Each undirected edge appears once in the arrays, so the 1/2 of the
    # double sum is already accounted for.
    return float(np.sum(ww * (z[ii] - z[jj]) ** 2))


def parse_edgelist(text: str) -> Graph:
    """Parse the edge-list text format: `n_nodes=<n>` header then `i j w` lines."""
    lines = [ln.strip() for ln in text.splitlines()]
    lines = [ln for ln in lines if ln and not ln.startswith("#")]
    if not lines or not lines[0].startswith("n_nodes="):
        raise DataFormatError("edge list must start with an n_nodes=<n> header")
    try:
        n = int(lines[0].split("=", 1)[1])
    except ValueError as exc:
        raise DataFormatError(f"bad n_nodes header: {lines[0]!r}") from exc
    edges = []
    for ln in lines[1:]:
        parts = ln.split()
        if len(parts) != 3:
            raise DataFormatError(f"bad edge line: {ln!r}")
        try:
            i, j, w = int(parts[0]), int(parts[1]), float(parts[2])
        except ValueError as exc:
            raise DataFormatError(f"bad edge line: {ln!r}") from exc
        if i > j:
            i, j = j, i
        edges.append((i, j, w))
    try:
        return Graph(n_nodes=n, edges=tuple(edges))
    except ValueError as exc:
        raise DataFormatError(str(exc)) from exc


def format_edgelist(g: Graph) -> str:
    """Inverse of parse_edgelist."""
    lines = [f"n_nodes={g.n_nodes}"]
    lines.extend(f"{i} {j} {w:.17g}" for i, j, w in g.edges)
    return "\n".join(lines) + "\n"


def parse_coordinates(text: str) -> tuple[list[str], np.ndarray]:
    """Parse the coordinates format: `id x y [z...]` lines.

    Returns node ids (in file order) and the coordinate array.
    """
    ids: list[str] = []
    rows: list[list[float]] = []
    for ln in text.splitlines():
        ln = ln.strip()
        if not ln or ln.startswith("#"):
            continue
        parts = ln.split()
        if len(parts) < 3:
            raise DataFormatError(f"bad coordinate line: {ln!r}")
        try:
            rows.append([float(v) for v in parts[1:]])
        except ValueError as exc:
            raise DataFormatError(f"bad coordinate line: {ln!r}") from exc
        ids.append(parts[0])
    if not rows:
        raise DataFormatError("empty coordinates file")
    width = len(rows[0])
    if any(len(r) != width for r in rows):
        raise DataFormatError("inconsistent coordinate dimensions")
    return ids, np.asarray(rows)
