"""Graph signals: synthesis, noise, masking, metrics, and dataset ingestion."""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from typing import Optional, Sequence, Union

import numpy as np

from .errors import DataFormatError
from .graphs import Graph, Laplacian, knn_geometric

__all__ = [
    "GraphSignal",
    "NoiseModel",
    "Observation",
    "SignalBounds",
    "bandlimited_signal",
    "add_noise",
    "snr_to_sigma",
    "nmse",
    "load_station_csv",
]

ArrayLike = Union[np.ndarray, Sequence[float], "GraphSignal"]


def signal_values(x: ArrayLike) -> np.ndarray:
    """Coerce a GraphSignal or array-like to a float vector."""
    if isinstance(x, GraphSignal):
        return x.values
    return np.asarray(x, dtype=float)


@dataclass(frozen=True)
class GraphSignal:
    """Real vector indexed by graph nodes, optionally carrying node ids."""

    values: np.ndarray
    node_ids: Optional[tuple[str, ...]] = None

    def __post_init__(self) -> None:
        arr = np.atleast_1d(np.asarray(self.values, dtype=float))
        if arr.ndim != 1:
            raise ValueError("a graph signal is a vector")
        if not np.all(np.isfinite(arr)):
            raise ValueError("graph signal entries must be finite")
        if self.node_ids is not None and len(self.node_ids) != arr.shape[0]:
            raise ValueError("node_ids length must match the signal length")
        object.__setattr__(self, "values", arr)

    def __len__(self) -> int:
        return self.values.shape[0]

    def __array__(self, dtype=None, copy=None) -> np.ndarray:
        return np.array(self.values, dtype=dtype)


@dataclass(frozen=True)
class NoiseModel:
    """Zero-mean Gaussian noise with covariance Sigma."""

    covariance: np.ndarray
    rng_seed: Optional[int] = None

    def __post_init__(self) -> None:
        cov = np.asarray(self.covariance, dtype=float)
        if cov.ndim != 2 or cov.shape[0] != cov.shape[1]:
            raise ValueError("covariance must be a square matrix")
        if not np.allclose(cov, cov.T, atol=1e-12 * max(1.0, float(np.abs(cov).max(initial=0.0)))):
            raise ValueError("covariance must be symmetric")
        eigs = np.linalg.eigvalsh(cov)
        if eigs.size and eigs[0] < -1e-10 * max(1.0, abs(float(eigs[-1]))):
            raise ValueError("covariance is not positive semi-definite")
        object.__setattr__(self, "covariance", cov)

    @staticmethod
    def isotropic(sigma2: float, n: int, rng_seed: Optional[int] = None) -> "NoiseModel":
        if sigma2 < 0:
            raise ValueError("sigma2 must be nonnegative")
        return NoiseModel(covariance=sigma2 * np.eye(n), rng_seed=rng_seed)

    @property
    def n(self) -> int:
        return self.covariance.shape[0]

    def sample(self, rng: Optional[np.random.Generator] = None) -> np.ndarray:
        """One noise draw. Sampling goes through the eigendecomposition so a
        singular (even zero) covariance is handled exactly."""
        if rng is None:
            rng = np.random.default_rng(self.rng_seed)
        lam, u = np.linalg.eigh(self.covariance)
        if lam[0] < -1e-10 * max(1.0, abs(float(lam[-1]))):
            raise ValueError("covariance is not positive semi-definite")
        scale = np.sqrt(np.clip(lam, 0.0, None))
        return u @ (scale * rng.standard_normal(self.n))


@dataclass(frozen=True)
class Observation:
    """Measured signal y together with the set of observed nodes."""

    y: np.ndarray
    mask: np.ndarray  # sorted unique node indices

    def __post_init__(self) -> None:
        y = np.asarray(self.y, dtype=float)
        mask = np.unique(np.asarray(self.mask, dtype=int))
        if mask.size == 0:
            raise ValueError("observation mask must be nonempty")
        if mask[0] < 0 or mask[-1] >= y.shape[0]:
            raise ValueError("mask indices out of range")
        object.__setattr__(self, "y", y)
        object.__setattr__(self, "mask", mask)

    @property
    def n(self) -> int:
        return self.y.shape[0]

    @property
    def is_full(self) -> bool:
        return self.mask.size == self.n

    @staticmethod
    def full(y: ArrayLike) -> "Observation":
        vals = signal_values(y)
        return Observation(y=vals, mask=np.arange(vals.shape[0]))


@dataclass(frozen=True)
class SignalBounds:
    """Elementwise lower/upper bounds on the unknown signal."""

    x_l: np.ndarray
    x_u: np.ndarray

    def __post_init__(self) -> None:
        lo = np.asarray(self.x_l, dtype=float)
        hi = np.asarray(self.x_u, dtype=float)
        if lo.shape != hi.shape or lo.ndim != 1:
            raise ValueError("bounds must be two vectors of equal length")
        if np.any(lo > hi):
            raise ValueError("lower bound exceeds upper bound")
        object.__setattr__(self, "x_l", lo)
        object.__setattr__(self, "x_u", hi)


def bandlimited_signal(
    lap: Laplacian,
    bandwidth: int,
    rng_seed: Optional[int] = None,
    randomize_coefficients: bool = False,
) -> GraphSignal:
    """Signal whose spectrum is one on the lowest `bandwidth` graph
    frequencies and zero elsewhere.

    With randomize_coefficients the ones are replaced by standard normal
    draws (seeded); the default spectrum is deterministic and the seed is
    unused.
    """
    n = lap.n
    if not 1 <= bandwidth <= n:
        raise ValueError(f"bandwidth {bandwidth} out of range [1, {n}]")
    _, u = lap.eigendecomposition
    if randomize_coefficients:
        rng = np.random.default_rng(rng_seed)
        coeff = rng.standard_normal(bandwidth)
    else:
        coeff = np.ones(bandwidth)
    return GraphSignal(values=u[:, :bandwidth] @ coeff)


def add_noise(x: ArrayLike, model: NoiseModel, rng: Optional[np.random.Generator] = None) -> Observation:
    """y = x + n with n ~ N(0, Sigma), observed at every node."""
    vals = signal_values(x)
    if vals.shape[0] != model.n:
        raise ValueError("noise covariance dimension does not match the signal")
    return Observation.full(vals + model.sample(rng))


def snr_to_sigma(x: ArrayLike, snr_db: float) -> float:
    """Noise standard deviation realizing SNR = ||x||^2 / (N sigma^2)."""
    vals = signal_values(x)
    power = float(vals @ vals)
    if power == 0.0:
        raise ValueError("SNR is undefined for the zero signal")
    snr_linear = 10.0 ** (snr_db / 10.0)
    return float(np.sqrt(power / (vals.shape[0] * snr_linear)))


def nmse(estimate: ArrayLike, truth: ArrayLike) -> float:
    """Normalized squared error ||xhat - x||^2 / ||x||^2."""
    est = signal_values(estimate)
    ref = signal_values(truth)
    denom = float(ref @ ref)
    if denom == 0.0:
        raise ValueError("NMSE is undefined for a zero reference signal")
    diff = est - ref
    return float(diff @ diff) / denom


def load_station_csv(
    source: Union[str, "io.TextIOBase"],
    k: int,
    kernel_scale: float,
) -> tuple[Graph, list[GraphSignal]]:
    """Load a station dataset (path or open text stream) and build its graph.

    Format: a `station_id,lat,lon` header block (one row per station), a
    blank line, then a wide matrix whose header row is
    `timestamp,<id1>,<id2>,...` and whose rows hold one snapshot each.
    Missing values are a hard error. The returned signals are de-meaned by
    a single scalar (the grand mean over all stations and timestamps),
    indexed in station declaration order.
    """
    if hasattr(source, "read"):
        text = source.read()
    else:
        with open(source, "r", encoding="utf-8") as fh:
            text = fh.read()
    station_part, _, matrix_part = text.partition("\n\n")
    if not matrix_part.strip():
        raise DataFormatError("station CSV must contain a blank line separating the two blocks")

    station_rows = list(csv.reader(io.StringIO(station_part.strip())))
    if not station_rows or [c.strip() for c in station_rows[0]] != ["station_id", "lat", "lon"]:
        raise DataFormatError("station block must start with the header station_id,lat,lon")
    ids: list[str] = []
    coords: list[list[float]] = []
    for row in station_rows[1:]:
        if len(row) != 3:
            raise DataFormatError(f"bad station row: {row!r}")
        sid, lat, lon = (c.strip() for c in row)
        if not sid or not lat or not lon:
            raise DataFormatError(f"station row with missing fields: {row!r}")
        try:
            coords.append([float(lat), float(lon)])
        except ValueError as exc:
            raise DataFormatError(f"bad station coordinates: {row!r}") from exc
        if sid in ids:
            raise DataFormatError(f"duplicate station id {sid!r}")
        ids.append(sid)
    if len(ids) < 2:
        raise DataFormatError("need at least two stations")

    matrix_rows = list(csv.reader(io.StringIO(matrix_part.strip())))
    header = [c.strip() for c in matrix_rows[0]]
    if not header or header[0] != "timestamp":
        raise DataFormatError("matrix block must start with a timestamp,<ids...> header")
    col_ids = header[1:]
    if sorted(col_ids) != sorted(ids):
        raise DataFormatError("matrix columns do not match the declared stations")
    col_order = [col_ids.index(sid) for sid in ids]

    values = []
    for row in matrix_rows[1:]:
        if len(row) != len(header):
            raise DataFormatError(f"snapshot row has {len(row)} fields, expected {len(header)}")
        cells = [c.strip() for c in row[1:]]
        if any(c == "" for c in cells):
            raise DataFormatError(f"missing value in snapshot {row[0]!r}")
        try:
            vals = np.asarray([float(c) for c in cells])
        except ValueError as exc:
            raise DataFormatError(f"bad snapshot row {row[0]!r}") from exc
        values.append(vals[col_order])
    if not values:
        raise DataFormatError("no snapshots in station CSV")

    data = np.asarray(values)  # (timestamps, stations)
    data = data - data.mean()
    graph = knn_geometric(np.asarray(coords), k=k, kernel_scale=kernel_scale)
    id_tuple = tuple(ids)
    sigs = [GraphSignal(values=row, node_ids=id_tuple) for row in data]
    return graph, sigs
