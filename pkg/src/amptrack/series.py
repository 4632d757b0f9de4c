"""Uniformly sampled real time series."""

from dataclasses import dataclass, field

import numpy as np


@dataclass
class TimeSeries:
    """A real signal sampled on a uniform time grid.

    Parameters
    ----------
    t0 : float
        Time of the first sample.
    dt : float
        Sample spacing, strictly positive.
    values : ndarray
        Real samples, at least two.
    label : str
        Channel name, e.g. ``"y"`` or ``"u"``.
    """

    t0: float
    dt: float
    values: np.ndarray
    label: str = ""

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        if self.dt <= 0:
            raise ValueError("dt must be positive")
        if self.values.ndim != 1 or self.values.size < 2:
            raise ValueError("need a 1-D series with at least two samples")

    def __len__(self) -> int:
        return self.values.size

    def times(self) -> np.ndarray:
        return self.t0 + self.dt * np.arange(self.values.size)

    @property
    def t_end(self) -> float:
        return self.t0 + self.dt * (self.values.size - 1)

    def index_of(self, t: float, tol: float = 1e-9) -> int:
        """Grid index of time ``t``; ``t`` must sit on a node (no interpolation)."""
        k = int(round((t - self.t0) / self.dt))
        if k < 0 or k >= self.values.size:
            raise ValueError(f"t={t} outside the sampled range")
        if abs(self.t0 + k * self.dt - t) > tol * max(1.0, abs(t)):
            raise ValueError(f"t={t} is not a grid node of this series")
        return k

    def same_grid(self, other: "TimeSeries", tol: float = 1e-12) -> bool:
        return (
            len(self) == len(other)
            and abs(self.t0 - other.t0) <= tol * max(1.0, abs(self.t0))
            and abs(self.dt - other.dt) <= tol * self.dt
        )


@dataclass
class RunRecord:
    """Per-step channels recorded by a propagation run, all on one grid."""

    t0: float
    dt: float
    channels: dict = field(default_factory=dict)

    def series(self, name: str) -> TimeSeries:
        return TimeSeries(self.t0, self.dt, self.channels[name], label=name)

    def __len__(self) -> int:
        first = next(iter(self.channels.values()))
        return len(first)
