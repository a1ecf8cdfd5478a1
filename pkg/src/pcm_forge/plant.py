"""Thermal network of the hybrid PCM + active-cooling loop.

The loop couples four elements through a pumped coolant:

    device --(hA_dc)--> coolant --(hA_cpcm)--> PCM
                          |
                      heat exchanger (rejects Q_hx to ambient)

Two three-way valves split the coolant stream.  With the total device-branch
flow rate fixed, mass conservation at steady state fixes every branch flow
from the two valve commands.  Because the coolant itself stores no energy
(negligible capacitance), the five coolant temperatures satisfy a linear
5x5 system once the branch flows are known; heat pulled from the device
equals heat rejected at the exchanger plus heat delivered to the PCM.

Everything in this module is a pure function of its inputs; all values are
safe to share across threads.  Temperatures are degrees Celsius, energies
Joules, powers Watts, flows kg/s.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import NumericalError, PlantInfeasibleError, ValidationError

# Index layout of the coolant temperature vector.
IDX_J1, IDX_D, IDX_HX, IDX_J2, IDX_PCM = range(5)

# Parameter order used for all plant sensitivities.
SENS_PARAMS = ("T_d", "T_m", "Q_hx", "v1", "v2")


@dataclass(frozen=True)
class PlantParams:
    """Physical constants of the cooling loop.

    Attributes:
        C_d: device thermal capacitance (J/degC).
        hA_dc: device-to-coolant conductance (W/degC).
        hA_cpcm: coolant-to-PCM conductance (W/degC).
        m_dot_d: coolant mass flow in the device branch (kg/s).
        c_p: coolant specific heat (J/kg/degC).
        alpha: surface absorptivity (-).
        A_s: absorbing surface area (m^2).
        h_inf: ambient convection coefficient (W/m^2/degC).
        eta_pv: electrical conversion efficiency of the device (-).
    """

    C_d: float
    hA_dc: float
    hA_cpcm: float
    m_dot_d: float
    c_p: float
    alpha: float
    A_s: float
    h_inf: float
    eta_pv: float

    def __post_init__(self):
        for name in ("C_d", "hA_dc", "hA_cpcm", "m_dot_d", "c_p", "A_s", "h_inf"):
            if not getattr(self, name) > 0.0:
                raise ValidationError(f"PlantParams.{name} must be strictly positive")
        if not 0.0 < self.alpha <= 1.0:
            raise ValidationError("PlantParams.alpha must lie in (0, 1]")
        if not 0.0 <= self.eta_pv < 1.0:
            raise ValidationError("PlantParams.eta_pv must lie in [0, 1)")


@dataclass(frozen=True)
class PcmDesign:
    """Static PCM design variables: latent capacity and melt temperature."""

    C_pcm: float  # latent storage capacity (J)
    T_m: float    # melting temperature (degC)

    def __post_init__(self):
        if not self.C_pcm > 0.0:
            raise ValidationError("PcmDesign.C_pcm must be strictly positive")

    @classmethod
    def from_mass(cls, m_pcm: float, L_f: float, T_m: float) -> "PcmDesign":
        """Build a design from PCM mass (kg) and latent heat of fusion (J/kg)."""
        if not (m_pcm > 0.0 and L_f > 0.0):
            raise ValidationError("PCM mass and latent heat must be strictly positive")
        return cls(C_pcm=m_pcm * L_f, T_m=T_m)


@dataclass(frozen=True)
class ValveCommand:
    """Throttle commands of the two three-way valves, each in [0, 1].

    v1 = 1 sends the exchanger-branch return entirely toward junction 2;
    v2 = 1 bypasses the heat exchanger entirely.
    """

    v1: float
    v2: float

    def __post_init__(self):
        if not 0.0 <= self.v1 <= 1.0:
            raise ValidationError("ValveCommand.v1 must lie in [0, 1]")
        if not 0.0 <= self.v2 <= 1.0:
            raise ValidationError("ValveCommand.v2 must lie in [0, 1]")


@dataclass(frozen=True)
class FlowSplit:
    """Branch mass flow rates implied by the valve commands (kg/s)."""

    m_hx: float
    m_pcm: float
    m_1: float
    m_2: float
    m_3: float


@dataclass(frozen=True)
class CoolantState:
    """Coolant temperatures at the five network locations (degC)."""

    T_c_j1: float
    T_c_d: float
    T_c_hx: float
    T_c_j2: float
    T_c_pcm: float

    def as_array(self) -> np.ndarray:
        return np.array(
            [self.T_c_j1, self.T_c_d, self.T_c_hx, self.T_c_j2, self.T_c_pcm]
        )


@dataclass(frozen=True)
class HeatFlows:
    """Power flows around the device at one instant (W).

    Q_in and Q_out are boundary terms; they are zero when the flows were
    produced by the coolant solve alone and are filled in by the caller
    once the boundary heat is known.
    """

    P_d: float
    P_pcm: float
    Q_hx: float
    Q_in: float = 0.0
    Q_out: float = 0.0


def flow_split(v: ValveCommand, m_dot_d: float) -> FlowSplit:
    """Split the device-branch flow across the network.

    Mass conservation at steady state gives every branch flow as a bilinear
    polynomial in the two valve commands.  The derived flows are computed
    by compensated subtraction (subtract, then subtract the remainder back)
    so that the junction identities m_hx + m_3 = m_dot_d,
    m_1 + m_pcm = m_dot_d and m_1 + m_2 = m_hx hold to the last bit rather
    than to roundoff; each flow stays within one ulp of its direct formula.
    """
    if not m_dot_d > 0.0:
        raise ValidationError("m_dot_d must be strictly positive")
    m_hx, m_pcm, m_1, m_2, m_3 = _flow_arrays(v.v1, v.v2, m_dot_d)
    return FlowSplit(m_hx=m_hx, m_pcm=m_pcm, m_1=m_1, m_2=m_2, m_3=m_3)


class CoolantBatch:
    """Vectorized coolant solution for a batch of operating points.

    Attributes:
        temps: (B, 5) coolant temperatures ordered (j1, d, hx, j2, pcm).
        P_d: (B,) heat pulled from the device into the coolant.
        P_pcm: (B,) heat delivered by the coolant to the PCM.
        dP_d, dP_pcm: (B, 5) sensitivities w.r.t. (T_d, T_m, Q_hx, v1, v2),
            present only when requested.  At a degenerate corner (a branch
            flow exactly zero) the valve sensitivities are the one-sided
            derivatives of the reduced system.
    """

    __slots__ = ("temps", "P_d", "P_pcm", "dP_d", "dP_pcm")

    def __init__(self, temps, P_d, P_pcm, dP_d=None, dP_pcm=None):
        self.temps = temps
        self.P_d = P_d
        self.P_pcm = P_pcm
        self.dP_d = dP_d
        self.dP_pcm = dP_pcm


def _flow_arrays(v1, v2, m_dot_d):
    """Branch flows for scalar or array valve commands.

    The exchanger-branch and valve-1 splits are refined once against their
    conservation partners so the three junction identities close exactly.
    """
    m_hx0 = (1.0 - v2) * m_dot_d
    m_3 = m_dot_d - m_hx0
    m_hx = m_dot_d - m_3
    m_10 = (1.0 - v1) * m_hx
    m_2 = m_hx - m_10
    m_1 = m_hx - m_2
    m_pcm = m_dot_d - m_1
    return m_hx, m_pcm, m_1, m_2, m_3


def coolant_batch(
    params: PlantParams,
    T_m,
    T_d,
    Q_hx,
    v1,
    v2,
    sensitivities: bool = False,
) -> CoolantBatch:
    """Solve the coolant network for a batch of operating points.

    All of T_m, T_d, Q_hx, v1, v2 broadcast to a common shape (B,).  For
    each point the five zero-capacitance energy balances are assembled as
    a linear system in the five coolant temperatures and solved by
    partially pivoted elimination.

    Degenerate branch flows are handled by row replacement: with zero
    exchanger flow the exchanger node becomes a pass-through (and any
    positive Q_hx is infeasible); with zero PCM-branch flow junction 2
    floats to the PCM-side temperature, which the PCM balance pins at T_m
    so no latent transfer occurs.

    Raises:
        PlantInfeasibleError: zero exchanger flow with Q_hx > 0.
        NumericalError: singular system outside the handled cases.
        ValidationError: command out of its domain.
    """
    T_m, T_d, Q_hx, v1, v2 = np.broadcast_arrays(
        *(np.atleast_1d(np.asarray(x, dtype=float)) for x in (T_m, T_d, Q_hx, v1, v2))
    )
    if np.any(Q_hx < 0.0):
        raise ValidationError("Q_hx must be nonnegative")
    if np.any((v1 < 0.0) | (v1 > 1.0) | (v2 < 0.0) | (v2 > 1.0)):
        raise ValidationError("valve commands must lie in [0, 1]")

    B = T_d.shape[0]
    cp = params.c_p
    h_dc = params.hA_dc
    h_cp = params.hA_cpcm
    a = params.m_dot_d * cp

    m_hx, m_pcm, m_1, m_2, m_3 = _flow_arrays(v1, v2, params.m_dot_d)
    hx_dead = m_hx == 0.0
    pcm_dead = m_pcm == 0.0

    if np.any(hx_dead & (Q_hx > 0.0)):
        k = int(np.argmax(hx_dead & (Q_hx > 0.0)))
        raise PlantInfeasibleError(
            "heat-exchanger branch carries no flow (v2 = 1) but "
            f"Q_hx = {Q_hx[k]:g} W > 0 is commanded (batch index {k})"
        )

    A = np.zeros((B, 5, 5))
    b = np.zeros((B, 5))

    # Junction 1 mixes the valve-1 return with the PCM return.
    A[:, 0, IDX_J1] = -params.m_dot_d
    A[:, 0, IDX_HX] = m_1
    A[:, 0, IDX_PCM] = m_pcm
    # Device balance: coolant heats from T_c_j1 to T_c_d absorbing P_d.
    A[:, 1, IDX_J1] = a
    A[:, 1, IDX_D] = -(h_dc + a)
    b[:, 1] = -h_dc * T_d
    # Exchanger balance: the branch stream cools by Q_hx.
    A[:, 2, IDX_D] = m_hx * cp
    A[:, 2, IDX_HX] = -m_hx * cp
    b[:, 2] = Q_hx
    # Junction 2 mixes the exchanger return with the valve-2 bypass.
    A[:, 3, IDX_D] = m_3
    A[:, 3, IDX_HX] = m_2
    A[:, 3, IDX_J2] = -m_pcm
    # PCM balance: the stream cools from T_c_j2 to T_c_pcm shedding P_pcm.
    A[:, 4, IDX_J2] = m_pcm * cp
    A[:, 4, IDX_PCM] = -(m_pcm * cp + h_cp)
    b[:, 4] = -h_cp * T_m

    # Degenerate rows: zero-flow balances reduce to 0 = 0 and are replaced.
    if np.any(hx_dead):
        A[hx_dead, 2, :] = 0.0
        A[hx_dead, 2, IDX_D] = 1.0
        A[hx_dead, 2, IDX_HX] = -1.0
        b[hx_dead, 2] = 0.0
    if np.any(pcm_dead):
        A[pcm_dead, 3, :] = 0.0
        A[pcm_dead, 3, IDX_J2] = 1.0
        A[pcm_dead, 3, IDX_PCM] = -1.0
        b[pcm_dead, 3] = 0.0

    try:
        temps = np.linalg.solve(A, b[:, :, None])[:, :, 0]
    except np.linalg.LinAlgError as exc:
        conds = [float(np.linalg.cond(A[i])) for i in range(min(B, 8))]
        raise NumericalError(
            f"coolant system singular outside handled degenerate cases; "
            f"leading condition numbers {conds}"
        ) from exc

    P_d = h_dc * (T_d - temps[:, IDX_D])
    P_pcm = h_cp * (temps[:, IDX_PCM] - T_m)

    if not sensitivities:
        return CoolantBatch(temps, P_d, P_pcm)

    # Adjoint solves for the two output temperatures: A^T lam_i = e_i.
    rhs = np.zeros((B, 5, 2))
    rhs[:, IDX_D, 0] = 1.0
    rhs[:, IDX_PCM, 1] = 1.0
    lam = np.linalg.solve(np.transpose(A, (0, 2, 1)), rhs)

    # d(temps)/d(theta) = lam^T (db/dtheta - (dA/dtheta) temps).
    md = params.m_dot_d
    dm = {
        # flow: (d/dv1, d/dv2)
        "hx": (np.zeros(B), -md * np.ones(B)),
        "pcm": ((1.0 - v2) * md, (1.0 - v1) * md),
        "m1": (-(1.0 - v2) * md, -(1.0 - v1) * md),
        "m2": ((1.0 - v2) * md, -v1 * md),
        "m3": (np.zeros(B), md * np.ones(B)),
    }
    # rows of (db/dtheta - (dA/dtheta) T) for each of the five parameters
    n_th = len(SENS_PARAMS)
    F = np.zeros((B, n_th, 5))
    F[:, 0, 1] = -h_dc                      # d b_device / d T_d
    F[:, 1, 4] = -h_cp                      # d b_pcm / d T_m
    F[:, 2, 2] = np.where(hx_dead, 0.0, 1.0)  # d b_hx / d Q_hx
    t_d = temps[:, IDX_D]
    t_hx = temps[:, IDX_HX]
    t_j2 = temps[:, IDX_J2]
    t_pcm = temps[:, IDX_PCM]
    for j, dv in enumerate((0, 1)):  # theta = v1, v2
        col = 3 + j
        F[:, col, 0] = -(dm["m1"][dv] * t_hx + dm["pcm"][dv] * t_pcm)
        F[:, col, 2] = np.where(hx_dead, 0.0, -dm["hx"][dv] * cp * (t_d - t_hx))
        F[:, col, 3] = np.where(
            pcm_dead,
            0.0,
            -(dm["m2"][dv] * t_hx + dm["m3"][dv] * t_d - dm["pcm"][dv] * t_j2),
        )
        F[:, col, 4] = -dm["pcm"][dv] * cp * (t_j2 - t_pcm)

    # dT[d]/dtheta and dT[pcm]/dtheta, shape (B, n_th)
    dT_d = np.einsum("bpj,bj->bp", F, lam[:, :, 0])
    dT_pcm = np.einsum("bpj,bj->bp", F, lam[:, :, 1])

    dP_d = -h_dc * dT_d
    dP_d[:, 0] += h_dc  # direct T_d term in P_d = hA_dc (T_d - T_c_d)
    dP_pcm = h_cp * dT_pcm
    dP_pcm[:, 1] -= h_cp  # direct T_m term in P_pcm = hA_cpcm (T_c_pcm - T_m)

    return CoolantBatch(temps, P_d, P_pcm, dP_d, dP_pcm)


def solve_coolant(
    params: PlantParams,
    design: PcmDesign,
    T_d: float,
    v: ValveCommand,
    Q_hx: float,
) -> tuple[CoolantState, HeatFlows]:
    """Solve the coolant network at one operating point.

    Returns the five coolant temperatures and the implied power flows.
    The returned flows always satisfy P_d = P_pcm + Q_hx: the coolant
    stores no energy.
    """
    out = coolant_batch(params, design.T_m, T_d, Q_hx, v.v1, v.v2)
    t = out.temps[0]
    state = CoolantState(*[float(x) for x in t])
    flows = HeatFlows(P_d=float(out.P_d[0]), P_pcm=float(out.P_pcm[0]), Q_hx=float(Q_hx))
    return state, flows


def pv_boundary(
    params: PlantParams, G: float, T_inf: float, T_d: float
) -> tuple[float, float]:
    """Boundary heat of an irradiated device with convective loss.

    Q_in is the absorbed irradiance; Q_out combines natural convection to
    ambient with the electrical power produced (a fixed fraction eta_pv of
    Q_in), both of which leave the thermal balance.
    """
    G_arr = np.asarray(G, dtype=float)
    if np.any(G_arr < 0.0):
        raise ValidationError("irradiance G must be nonnegative")
    Q_in = params.alpha * params.A_s * G_arr
    Q_out = params.h_inf * params.A_s * (np.asarray(T_d) - np.asarray(T_inf)) + (
        params.eta_pv * Q_in
    )
    if Q_in.ndim == 0:
        return float(Q_in), float(Q_out)
    return Q_in, Q_out


def device_temperature(params: PlantParams, E_d):
    """T_d = E_d / C_d."""
    return E_d / params.C_d


def device_energy(params: PlantParams, T_d):
    """E_d = C_d * T_d."""
    return params.C_d * T_d


def pcm_soc(design: PcmDesign, E_pcm):
    """Melt fraction SOC = E_pcm / C_pcm."""
    return E_pcm / design.C_pcm


def pcm_energy(design: PcmDesign, soc):
    """E_pcm = C_pcm * SOC."""
    return design.C_pcm * soc


def state_conversions(
    params: PlantParams, design: PcmDesign, E_d: float, E_pcm: float
) -> tuple[float, float]:
    """Map stored energies to (device temperature, PCM melt fraction)."""
    return device_temperature(params, E_d), pcm_soc(design, E_pcm)
