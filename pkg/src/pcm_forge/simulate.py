"""Forward time-marching of the two-state thermal system.

The states are the stored energies (E_d, E_pcm).  Each step evaluates the
boundary heat and the coolant network at the left knot and advances both
energies by explicit forward Euler, exactly matching the discretization
the optimizer's equality constraints impose, so a rollout is the ground
truth for any decoded optimizer solution.

States are not clamped: the melt fraction may leave [0, 1].  Bound
violations are reported through the slack channel instead, mirroring the
soft-constraint treatment in the optimization problem.  (A physical clamp
is available for demonstration plots only.)
"""

from __future__ import annotations

import io
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import ValidationError
from .plant import PcmDesign, coolant_batch, pv_boundary
from .scenario import Scenario

TRAJECTORY_COLUMNS = (
    "t_s",
    "E_d",
    "E_pcm",
    "T_d",
    "SOC",
    "P_d",
    "P_pcm",
    "Q_hx",
    "Q_in",
    "Q_out",
    "s_d",
    "s_pcm",
    "T_c_j1",
    "T_c_d",
    "T_c_hx",
    "T_c_j2",
    "T_c_pcm",
)


@dataclass(frozen=True)
class ControlSequence:
    """Control inputs over the horizon, one value per interval (length N-1)."""

    Q_hx: np.ndarray
    v1: np.ndarray
    v2: np.ndarray

    def __post_init__(self):
        for name in ("Q_hx", "v1", "v2"):
            object.__setattr__(self, name, np.asarray(getattr(self, name), dtype=float))
        if not (self.Q_hx.shape == self.v1.shape == self.v2.shape):
            raise ValidationError("control sequences must have equal length")
        if self.Q_hx.ndim != 1:
            raise ValidationError("control sequences must be 1-d")

    def __len__(self) -> int:
        return int(self.Q_hx.shape[0])

    @classmethod
    def constant(cls, n_intervals: int, Q_hx: float, v1: float, v2: float):
        return cls(
            Q_hx=np.full(n_intervals, float(Q_hx)),
            v1=np.full(n_intervals, float(v1)),
            v2=np.full(n_intervals, float(v2)),
        )

    @classmethod
    def from_policy(cls, scenario: Scenario, Q_hx: float | None = None):
        """Constant controls matching a scenario's fixed policy.

        For a fixed-valve policy the exchanger load must be supplied.
        """
        p = scenario.policy
        if not p.valves_fixed:
            raise ValidationError("policy does not fix the valve commands")
        q = p.Q_hx if p.q_fixed else Q_hx
        if q is None:
            raise ValidationError("Q_hx value required for this policy")
        return cls.constant(scenario.profile.N - 1, q, p.v1, p.v2)


@dataclass
class Trajectory:
    """Time-indexed record of states, controls, powers and slacks.

    All arrays have one entry per knot.  The control-dependent quantities
    at the terminal knot are evaluated with the last interval's control
    held (zero-order extension); they do not enter any objective.
    """

    dt: float
    E_d: np.ndarray
    E_pcm: np.ndarray
    T_d: np.ndarray
    SOC: np.ndarray
    P_d: np.ndarray
    P_pcm: np.ndarray
    Q_hx: np.ndarray
    Q_in: np.ndarray
    Q_out: np.ndarray
    s_d: np.ndarray
    s_pcm: np.ndarray
    T_c_j1: np.ndarray
    T_c_d: np.ndarray
    T_c_hx: np.ndarray
    T_c_j2: np.ndarray
    T_c_pcm: np.ndarray

    @property
    def N(self) -> int:
        return int(self.E_d.shape[0])

    @property
    def t(self) -> np.ndarray:
        return self.dt * np.arange(self.N)

    @property
    def t_f(self) -> float:
        return self.dt * (self.N - 1)

    def column(self, name: str) -> np.ndarray:
        if name == "t_s":
            return self.t
        return getattr(self, name)


def interval_slacks(values: np.ndarray, lb: float, ub: float) -> np.ndarray:
    """Distance of each value to the interval [lb, ub]; zero inside."""
    return np.maximum(0.0, np.maximum(lb - values, values - ub))


def pcm_energy_bounds(scenario: Scenario, design: PcmDesign) -> tuple[float, float]:
    """PCM energy bounds in Joules for a concrete capacity."""
    b = scenario.bounds
    return b.E_pcm_lb_frac * design.C_pcm, b.E_pcm_ub_frac * design.C_pcm


def _validate_controls(scenario: Scenario, controls: ControlSequence) -> None:
    b = scenario.bounds
    if len(controls) != scenario.profile.N - 1:
        raise ValidationError(
            f"expected {scenario.profile.N - 1} control intervals, got {len(controls)}"
        )
    if np.any((controls.Q_hx < b.Q_hx_lb) | (controls.Q_hx > b.Q_hx_ub)):
        raise ValidationError("Q_hx sequence violates its bounds")
    for name in ("v1", "v2"):
        v = getattr(controls, name)
        if np.any((v < b.v_lb) | (v > b.v_ub)):
            raise ValidationError(f"{name} sequence violates the valve bounds")


def step(
    scenario: Scenario,
    design: PcmDesign,
    state: tuple[float, float],
    controls: tuple[float, float, float],
    disturbance: tuple[float, float],
) -> tuple[float, float]:
    """Advance (E_d, E_pcm) one knot by forward Euler.

    `controls` is (Q_hx, v1, v2) and `disturbance` is (G, T_inf), both
    sampled at the left knot and held over the interval.
    """
    e_d, e_pcm = state
    q, v1, v2 = controls
    g, t_inf = disturbance
    t_d = e_d / scenario.params.C_d
    q_in, q_out = pv_boundary(scenario.params, g, t_inf, t_d)
    out = coolant_batch(scenario.params, design.T_m, t_d, q, v1, v2)
    dt = scenario.profile.dt
    return (
        e_d + dt * (q_in - q_out - float(out.P_d[0])),
        e_pcm + dt * float(out.P_pcm[0]),
    )


def rollout(
    scenario: Scenario,
    design: PcmDesign,
    controls: ControlSequence,
    clamp_soc: bool = False,
) -> Trajectory:
    """Simulate the full horizon from the scenario's initial condition.

    Slacks are the exact distances of the stored energies to their bounds
    at every knot.  With `clamp_soc` the PCM energy is saturated at its
    physical range after each step; that mode is for demonstration plots
    and must not be used to cross-check optimizer output.
    """
    _validate_controls(scenario, controls)
    prof = scenario.profile
    params = scenario.params
    n = prof.N
    dt = prof.dt

    e_d = np.empty(n)
    e_pcm = np.empty(n)
    p_d = np.empty(n)
    p_pcm = np.empty(n)
    q_in = np.empty(n)
    q_out = np.empty(n)
    temps = np.empty((n, 5))

    e_d[0], e_pcm[0] = scenario.initial_energies(design)
    e_lo, e_hi = pcm_energy_bounds(scenario, design)

    for k in range(n - 1):
        t_d = e_d[k] / params.C_d
        q_in[k], q_out[k] = pv_boundary(params, prof.G[k], prof.T_inf[k], t_d)
        out = coolant_batch(
            params, design.T_m, t_d, controls.Q_hx[k], controls.v1[k], controls.v2[k]
        )
        p_d[k] = out.P_d[0]
        p_pcm[k] = out.P_pcm[0]
        temps[k] = out.temps[0]
        e_d[k + 1] = e_d[k] + dt * (q_in[k] - q_out[k] - p_d[k])
        e_pcm[k + 1] = e_pcm[k] + dt * p_pcm[k]
        if clamp_soc:
            e_pcm[k + 1] = min(max(e_pcm[k + 1], e_lo), e_hi)

    # terminal knot: hold the last control for reporting only
    t_d = e_d[-1] / params.C_d
    q_in[-1], q_out[-1] = pv_boundary(params, prof.G[-1], prof.T_inf[-1], t_d)
    out = coolant_batch(
        params, design.T_m, t_d, controls.Q_hx[-1], controls.v1[-1], controls.v2[-1]
    )
    p_d[-1] = out.P_d[0]
    p_pcm[-1] = out.P_pcm[0]
    temps[-1] = out.temps[0]

    q_traj = np.concatenate([controls.Q_hx, controls.Q_hx[-1:]])
    return Trajectory(
        dt=dt,
        E_d=e_d,
        E_pcm=e_pcm,
        T_d=e_d / params.C_d,
        SOC=e_pcm / design.C_pcm,
        P_d=p_d,
        P_pcm=p_pcm,
        Q_hx=q_traj,
        Q_in=q_in,
        Q_out=q_out,
        s_d=interval_slacks(e_d, scenario.bounds.E_d_lb, scenario.bounds.E_d_ub),
        s_pcm=interval_slacks(e_pcm, e_lo, e_hi),
        T_c_j1=temps[:, 0],
        T_c_d=temps[:, 1],
        T_c_hx=temps[:, 2],
        T_c_j2=temps[:, 3],
        T_c_pcm=temps[:, 4],
    )


def write_trajectory_csv(traj: Trajectory, path) -> None:
    """One row per knot, columns in the documented trajectory order."""
    buf = io.StringIO()
    buf.write(",".join(TRAJECTORY_COLUMNS) + "\n")
    cols = [traj.column(c) for c in TRAJECTORY_COLUMNS]
    for k in range(traj.N):
        buf.write(",".join(repr(float(c[k])) for c in cols) + "\n")
    Path(path).write_text(buf.getvalue(), encoding="utf-8", newline="\n")
