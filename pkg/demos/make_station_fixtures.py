"""Regenerate the station-dataset fixtures under data/.

Two synthetic weather-station layouts with the CSV schema the loader
expects (station block, blank line, snapshot matrix):

* molene_shaped.csv: 32 coastal stations, 48 hourly snapshots, meant for
  the 5-nearest-neighbor graph.
* noaa_shaped.csv: 25 continental stations, 40 snapshots, meant for the
  7-nearest-neighbor graph.

Each temperature field is a smooth function of the coordinates plus a
shared daily cycle and a small station-level disturbance, rounded to a
tenth of a degree. Deterministic: rerunning this script reproduces the
shipped files byte for byte.
"""

from pathlib import Path

import numpy as np

DATA_DIR = Path(__file__).resolve().parent.parent / "data"


def station_block(ids, coords) -> list[str]:
    lines = ["station_id,lat,lon"]
    for sid, (lat, lon) in zip(ids, coords):
        lines.append(f"{sid},{lat:.4f},{lon:.4f}")
    return lines


def temperature_matrix(
    coords: np.ndarray, n_snapshots: int, base: float, rng: np.random.Generator
) -> np.ndarray:
    n = coords.shape[0]
    lat = coords[:, 0]
    lon = coords[:, 1]
    # Smooth spatial profile: cooler north, a gentle coastal gradient.
    spatial = -0.9 * (lat - lat.mean()) + 0.4 * np.sin(1.7 * (lon - lon.min()))
    hours = np.arange(n_snapshots)
    daily = 3.0 * np.sin(2.0 * np.pi * (hours % 24) / 24.0 - 0.8)
    drift = 0.05 * hours
    field = base + spatial[None, :] + (daily + drift)[:, None]
    field = field + 0.3 * rng.standard_normal((n_snapshots, n))
    return np.round(field, 1)


def write_fixture(path: Path, ids, coords, matrix) -> None:
    lines = station_block(ids, coords)
    lines.append("")
    lines.append("timestamp," + ",".join(ids))
    for t in range(matrix.shape[0]):
        row = ",".join(f"{v:.1f}" for v in matrix[t])
        lines.append(f"t{t:03d},{row}")
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    print(f"wrote {path} ({len(ids)} stations, {matrix.shape[0]} snapshots)")


def make_molene_shaped() -> None:
    rng = np.random.default_rng(2024_05)
    n = 32
    lat = rng.uniform(47.6, 48.9, size=n)
    lon = rng.uniform(-5.1, -3.2, size=n)
    coords = np.column_stack([lat, lon])
    ids = [f"st{j:02d}" for j in range(n)]
    matrix = temperature_matrix(coords, 48, base=10.5, rng=rng)
    write_fixture(DATA_DIR / "molene_shaped.csv", ids, coords, matrix)


def make_noaa_shaped() -> None:
    rng = np.random.default_rng(2024_07)
    n = 25
    # Compact plains region: keeps the Gaussian kernel weights of the
    # 7-nearest-neighbor edges well away from underflow at the default scale.
    lat = rng.uniform(38.0, 41.0, size=n)
    lon = rng.uniform(-100.0, -96.0, size=n)
    coords = np.column_stack([lat, lon])
    ids = [f"us{j:02d}" for j in range(n)]
    matrix = temperature_matrix(coords, 40, base=14.0, rng=rng)
    write_fixture(DATA_DIR / "noaa_shaped.csv", ids, coords, matrix)


if __name__ == "__main__":
    DATA_DIR.mkdir(exist_ok=True)
    make_molene_shaped()
    make_noaa_shaped()
