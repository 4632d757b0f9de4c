"""Proportional amplifier controller and the self-consistent tracking loop.

The loop is strictly causal: the control field at step n is a closed-form
function of the driven state at step n and the reference sample Y_n, and
is then held constant while the state advances one step.  Reference runs
and tracking runs share the same loop so that a system tracking itself
reproduces its reference arithmetic bit for bit (the control field is
exactly zero, not merely small).
"""

from dataclasses import dataclass, field

import numpy as np

from .exceptions import GridMismatchError
from .series import RunRecord, TimeSeries

__all__ = [
    "FeedbackConfig",
    "TrackingResult",
    "atom_control_field",
    "hubbard_control_field",
    "run_open_loop",
    "run_tracking",
    "tracking_residual",
]


@dataclass(frozen=True)
class FeedbackConfig:
    """Amplifier gain, singularity guard threshold, and output stride.

    The guard policy is fixed: when the control-law denominator falls
    below ``epsilon`` in magnitude, the previous control value is held and
    the step is flagged.  ``output_stride`` thins file output only; the
    loop itself always works on the full propagation grid.
    """

    k_p: float
    epsilon: float = 1e-6
    output_stride: int = 1

    def __post_init__(self):
        if self.k_p < 0:
            raise ValueError("k_p must be nonnegative")
        if self.epsilon <= 0:
            raise ValueError("epsilon must be positive")
        if self.output_stride < 1 or int(self.output_stride) != self.output_stride:
            raise ValueError("output_stride must be a positive integer")


@dataclass
class TrackingResult:
    """Everything a tracking run records, on the propagation grid."""

    t0: float
    dt: float
    channels: dict
    u: np.ndarray
    e_total: np.ndarray
    response: np.ndarray
    y: np.ndarray
    residual: np.ndarray
    rms_relative: float
    absolute_rms: bool
    guard_trips: np.ndarray
    k_p: float
    epsilon: float

    def series(self, name: str) -> TimeSeries:
        data = {
            "u": self.u,
            "e_total": self.e_total,
            "response": self.response,
            "y": self.y,
            "residual": self.residual,
            **self.channels,
        }
        return TimeSeries(self.t0, self.dt, data[name], label=name)


def atom_control_field(force: float, e_tl: float, y: float, k_p: float) -> float:
    """Closed-form control for momentum tracking on the grid platform.

    Solving u = k_p [d<p>/dt - Y] with d<p>/dt = <F> - E_tl - u gives
    u = k_p/(1+k_p) (<F> - E_tl - Y); the denominator 1+k_p never vanishes.
    """
    return (k_p / (1.0 + k_p)) * (force - e_tl - y)


def hubbard_control_field(
    kin: float,
    comm: float,
    e_tl: float,
    y: float,
    k_p: float,
    a: float,
    cfg: FeedbackConfig,
    u_prev: float = 0.0,
):
    """Closed-form control for current tracking on the lattice platform.

    With the current and kinetic operators defined in `lattice`, the
    Ehrenfest identity reads d<J>/dt = -a^2 E <H_kin> + i<[H, J]>, so the
    self-consistent control law is

        u = k_p (-a^2 E_tl <H_kin> + i<[H,J]> - Y) / (1 + k_p a^2 <H_kin>).

    The coupling in both places is a squared: one power from dPhi/dt = -aE
    and one from dJ/dPhi = a H_kin.  When |denominator| < cfg.epsilon the
    channel is singular (the current stops responding to the field); the
    previous control value is returned with the guard flag set.
    """
    c = a * a
    denom = 1.0 + k_p * c * kin
    if abs(denom) < cfg.epsilon:
        return u_prev, True
    u = k_p * ((-c * e_tl * kin + comm) - y) / denom
    return u, False


def _rms(x: np.ndarray) -> float:
    return float(np.sqrt(np.mean(np.square(x))))


def tracking_residual(result) -> float:
    """Relative RMS mismatch between the driven response and the target.

    Falls back to the absolute RMS when the target is identically zero
    (that case is flagged on the result object by the loop).
    """
    r = np.asarray(result.response, dtype=float) - np.asarray(result.y, dtype=float)
    denom = _rms(np.asarray(result.y, dtype=float))
    if denom == 0.0:
        return _rms(r)
    return _rms(r) / denom


def run_open_loop(system, u_forced: np.ndarray | None = None) -> RunRecord:
    """Propagate without feedback and record the Ehrenfest response as y.

    With ``u_forced`` given, that control sequence is replayed instead of
    zero (used to re-drive a system with a recorded field).
    """
    n = system.n_steps
    if u_forced is not None and len(u_forced) != n + 1:
        raise GridMismatchError("forced control sequence does not match the grid")
    psi = system.initial_state()
    names = system.channel_names
    cols = {name: np.empty(n + 1) for name in names}
    e_total_arr = np.empty(n + 1)
    y_arr = np.empty(n + 1)
    for i in range(n + 1):
        obs = system.observables(psi)
        e_tl = system.e_tl(i * system.dt)
        u = 0.0 if u_forced is None else float(u_forced[i])
        e_total = e_tl + u
        y_arr[i] = system.response(obs, e_total)
        for name in names:
            cols[name][i] = obs[name]
        e_total_arr[i] = e_total
        if i < n:
            psi = system.advance(psi, i, u)
    channels = dict(cols)
    channels["e_total"] = e_total_arr
    channels["y"] = y_arr
    return RunRecord(t0=0.0, dt=system.dt, channels=channels)


def run_tracking(system, reference: TimeSeries, cfg: FeedbackConfig) -> TrackingResult:
    """Drive ``system`` so its response follows the reference signal.

    The reference must be sampled on the identical time grid used for the
    driven propagation; no interpolation is performed.
    """
    n = system.n_steps
    if len(reference) != n + 1:
        raise GridMismatchError(
            f"reference has {len(reference)} samples, propagation needs {n + 1}"
        )
    if abs(reference.t0) > 1e-12 or abs(reference.dt - system.dt) > 1e-12 * system.dt:
        raise GridMismatchError("reference grid does not match the propagation grid")

    psi = system.initial_state()
    y = reference.values
    names = system.channel_names
    cols = {name: np.empty(n + 1) for name in names}
    u_arr = np.empty(n + 1)
    e_total_arr = np.empty(n + 1)
    resp_arr = np.empty(n + 1)
    tripped = np.zeros(n + 1, dtype=bool)
    u_prev = 0.0
    for i in range(n + 1):
        obs = system.observables(psi)
        e_tl = system.e_tl(i * system.dt)
        u, guard = system.control(obs, e_tl, y[i], cfg, u_prev)
        e_total = e_tl + u
        resp = system.response(obs, e_total)
        for name in names:
            cols[name][i] = obs[name]
        u_arr[i] = u
        e_total_arr[i] = e_total
        resp_arr[i] = resp
        tripped[i] = guard
        if i < n:
            psi = system.advance(psi, i, u)
        u_prev = u

    residual = resp_arr - y
    y_rms = _rms(y)
    absolute = y_rms == 0.0
    rms_rel = _rms(residual) if absolute else _rms(residual) / y_rms
    channels = dict(cols)
    channels["e_total"] = e_total_arr
    return TrackingResult(
        t0=0.0,
        dt=system.dt,
        channels=channels,
        u=u_arr,
        e_total=e_total_arr,
        response=resp_arr,
        y=y.copy(),
        residual=residual,
        rms_relative=rms_rel,
        absolute_rms=absolute,
        guard_trips=np.flatnonzero(tripped),
        k_p=cfg.k_p,
        epsilon=cfg.epsilon,
    )
