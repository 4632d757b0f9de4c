"""Deterministic CSV and JSON writers for run artifacts.

Every float is written with ``repr``, the shortest decimal string that
round-trips to the identical binary value, so rerunning a configuration
on the same build produces byte-identical files.  Column orders are
fixed per platform and documented in docs/formats.md; readers rebuild
time series from the ``t`` column without interpolation.
"""

import json
from dataclasses import dataclass

import numpy as np

from .series import RunRecord, TimeSeries

__all__ = [
    "REFERENCE_COLUMNS",
    "TRACKING_COLUMNS",
    "SPECTRUM_COLUMNS",
    "Table",
    "write_reference_csv",
    "write_tracking_csv",
    "write_spectrum_csv",
    "read_table",
    "write_metadata",
    "read_metadata",
]

# fixed column orders; the per-platform observable channels come first
REFERENCE_COLUMNS = {
    "atom": ("t", "p", "force", "e_total", "y"),
    "hubbard": ("t", "current", "kinetic", "phase", "e_total", "y"),
}

TRACKING_COLUMNS = {
    "atom": (
        "t", "p", "force", "e_total", "u", "response", "y", "residual", "guard",
    ),
    "hubbard": (
        "t", "current", "kinetic", "phase", "e_total",
        "u", "response", "y", "residual", "guard",
    ),
}

SPECTRUM_COLUMNS = ("omega", "harmonic_order", "power")


def _write_csv(path, header, columns, stride: int = 1) -> None:
    if stride < 1 or int(stride) != stride:
        raise ValueError("stride must be a positive integer")
    n = len(columns[0])
    rows = range(0, n, stride)
    with open(path, "w", newline="\n") as fh:
        fh.write(",".join(header) + "\n")
        for i in rows:
            fh.write(",".join(repr(float(col[i])) for col in columns) + "\n")


def _times(t0: float, dt: float, n: int) -> np.ndarray:
    return t0 + dt * np.arange(n)


def write_reference_csv(path, record: RunRecord, platform: str, stride: int = 1) -> None:
    """Write an open-loop run in the fixed per-platform column order."""
    header = REFERENCE_COLUMNS[platform]
    n = len(record)
    columns = [_times(record.t0, record.dt, n)]
    columns += [record.channels[name] for name in header[1:]]
    _write_csv(path, header, columns, stride)


def write_tracking_csv(path, result, platform: str, stride: int = 1) -> None:
    """Write a tracking run; ``guard`` is 1 on steps where the guard held u."""
    header = TRACKING_COLUMNS[platform]
    n = len(result.u)
    guard = np.zeros(n)
    guard[result.guard_trips] = 1.0
    named = {
        "t": _times(result.t0, result.dt, n),
        "e_total": result.e_total,
        "u": result.u,
        "response": result.response,
        "y": result.y,
        "residual": result.residual,
        "guard": guard,
        **result.channels,
    }
    _write_csv(path, header, [named[name] for name in header], stride)


def write_spectrum_csv(path, spectrum, omega0: float) -> None:
    """Write a one-sided power spectrum with the harmonic-order axis."""
    if omega0 <= 0:
        raise ValueError("omega0 must be positive")
    order = spectrum.omega / omega0
    _write_csv(path, SPECTRUM_COLUMNS, [spectrum.omega, order, spectrum.power])


@dataclass
class Table:
    """Columns of a run CSV, with time-series reconstruction."""

    header: tuple
    columns: dict

    def __len__(self) -> int:
        return len(self.columns[self.header[0]])

    def series(self, name: str) -> TimeSeries:
        """Rebuild a channel as a uniform series from the ``t`` column."""
        if name not in self.columns:
            raise ValueError(
                f"no column {name!r}; file has {', '.join(self.header)}"
            )
        t = self.columns["t"]
        if len(t) < 2:
            raise ValueError("need at least two rows to form a series")
        dt = float(t[1] - t[0])
        steps = np.diff(t)
        if np.any(np.abs(steps - dt) > 1e-9 * max(1.0, abs(dt))):
            raise ValueError("t column is not uniformly spaced")
        return TimeSeries(float(t[0]), dt, self.columns[name], label=name)


def read_table(path) -> Table:
    """Read a CSV written by this module back into named float columns."""
    with open(path, "r", newline="\n") as fh:
        lines = [line.rstrip("\n") for line in fh if line.strip()]
    if not lines:
        raise ValueError(f"{path}: empty file")
    header = tuple(lines[0].split(","))
    raw = [line.split(",") for line in lines[1:]]
    if any(len(row) != len(header) for row in raw):
        raise ValueError(f"{path}: ragged rows")
    data = np.array(raw, dtype=float)
    columns = {name: data[:, j] for j, name in enumerate(header)}
    return Table(header=header, columns=columns)


def write_metadata(path, payload: dict) -> None:
    """Write a JSON sidecar with sorted keys (no timestamps, no randomness)."""
    with open(path, "w", newline="\n") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")


def read_metadata(path) -> dict:
    with open(path, "r") as fh:
        return json.load(fh)
