"""Simultaneous direct transcription of the design-and-control problem.

The continuous problem is discretized on the disturbance knot grid: stored
energies live at every knot, controls on every interval, and the forward
Euler dynamics become equality (defect) constraints.  The coolant
temperatures, device temperature, melt fraction and both power flows are
eliminated by closed-form substitution through the linear coolant solve,
which shrinks the decision vector to

    [C_pcm, T_m, Q_hx_k..., v1_k..., v2_k..., E_d_k..., E_pcm_k...,
     s_d_k..., s_pcm_k...]

with control blocks present only where the scenario's policy leaves them
free.  Energy bounds are imposed softly: four linear inequality rows per
knot allow each energy to leave its box by exactly the (penalized,
nonnegative) slack at that knot.

Everything is evaluated in scaled coordinates (energies x 1e-5, exchanger
power x 1e-2, melt temperature x 1e-1) and the objective is normalized by
its magnitude at a nominal rollout, so a well-posed problem presents O(1)
quantities to the solver.  Derivatives are analytic: the chain rule runs
through the coolant solve via the adjoint of its 5x5 linear system.  A
finite-difference fallback is provided for verification.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ValidationError
from .objective import evaluate as evaluate_objectives, total_objective
from .plant import PcmDesign, coolant_batch, pv_boundary
from .scenario import Scenario
from .simulate import ControlSequence, Trajectory, interval_slacks, rollout
from .triplets import TripletMatrix

# scale factors: raw value = scale * scaled value.  Powers of two so the
# scaled/raw round trip is exact: nearest binary powers of the magnitudes
# the variables actually take (energies ~1e5 J, exchanger power ~1e2 W,
# melt temperature tens of degC).
SCALE_ENERGY = float(2**17)  # 131072
SCALE_POWER = float(2**7)    # 128
SCALE_TEMP = float(2**5)     # 32


@dataclass(frozen=True)
class VariableLayout:
    """Index map of the decision vector; every block is a bijection slice."""

    C_pcm: int
    T_m: int
    Q_hx: np.ndarray
    v1: np.ndarray
    v2: np.ndarray
    E_d: np.ndarray
    E_pcm: np.ndarray
    s_d: np.ndarray
    s_pcm: np.ndarray
    n_vars: int

    def blocks(self) -> dict:
        return {
            "C_pcm": np.array([self.C_pcm]),
            "T_m": np.array([self.T_m]),
            "Q_hx": self.Q_hx,
            "v1": self.v1,
            "v2": self.v2,
            "E_d": self.E_d,
            "E_pcm": self.E_pcm,
            "s_d": self.s_d,
            "s_pcm": self.s_pcm,
        }


@dataclass
class EvalPoint:
    """One evaluation of the transcription at a scaled decision vector."""

    z: np.ndarray
    objective: float
    residuals: np.ndarray
    gradient: np.ndarray
    jacobian: TripletMatrix


@dataclass
class NlpProblem:
    """Assembled transcription with analytic evaluators.

    Attributes of interest beyond the obvious: `scale` maps scaled to raw
    variables (raw = scale * scaled), `objective_scale` multiplies the raw
    total objective, and `ineq` is the constant linear system A z + b >= 0
    of the slack-relaxed energy bounds.
    """

    scenario: Scenario
    layout: VariableLayout
    scale: np.ndarray
    lower: np.ndarray
    upper: np.ndarray
    n_eq: int
    ineq: tuple[TripletMatrix, np.ndarray]
    nominal_design: PcmDesign
    objective_scale: float = 1.0
    _jac_pattern: tuple = field(default=None, repr=False)
    _fixed_controls: tuple = field(default=None, repr=False)
    _q_in: np.ndarray = field(default=None, repr=False)

    # ------------------------------------------------------------------
    # decoding helpers
    # ------------------------------------------------------------------

    @property
    def n_vars(self) -> int:
        return self.layout.n_vars

    @property
    def N(self) -> int:
        return self.scenario.profile.N

    def raw(self, z: np.ndarray) -> np.ndarray:
        return z * self.scale

    def controls_from(self, z: np.ndarray) -> ControlSequence:
        """Control sequence at z, merging decision blocks with fixed values."""
        zr = self.raw(z)
        q_fix, v1_fix, v2_fix = self._fixed_controls
        lay = self.layout
        q = zr[lay.Q_hx] if lay.Q_hx.size else q_fix
        v1 = zr[lay.v1] if lay.v1.size else v1_fix
        v2 = zr[lay.v2] if lay.v2.size else v2_fix
        return ControlSequence(Q_hx=q, v1=v1, v2=v2)

    def design_from(self, z: np.ndarray) -> PcmDesign:
        zr = self.raw(z)
        return PcmDesign(C_pcm=zr[self.layout.C_pcm], T_m=zr[self.layout.T_m])

    def decode(self, z: np.ndarray) -> tuple[PcmDesign, ControlSequence, Trajectory]:
        """Recover design, controls, and the trajectory the knots describe.

        States and slacks are read off the decision vector (they satisfy
        the dynamics only as well as the residuals say); the algebraic
        quantities are recomputed from the plant.  The terminal knot holds
        the last control, as in the simulator.
        """
        zr = self.raw(z)
        lay = self.layout
        design = self.design_from(z)
        controls = self.controls_from(z)
        e_d = zr[lay.E_d]
        e_pcm = zr[lay.E_pcm]
        prof = self.scenario.profile
        params = self.scenario.params
        t_d = e_d / params.C_d
        q_ext = np.concatenate([controls.Q_hx, controls.Q_hx[-1:]])
        v1_ext = np.concatenate([controls.v1, controls.v1[-1:]])
        v2_ext = np.concatenate([controls.v2, controls.v2[-1:]])
        out = coolant_batch(params, design.T_m, t_d, q_ext, v1_ext, v2_ext)
        q_in, q_out = pv_boundary(params, prof.G, prof.T_inf, t_d)
        return design, controls, Trajectory(
            dt=prof.dt,
            E_d=e_d,
            E_pcm=e_pcm,
            T_d=t_d,
            SOC=e_pcm / design.C_pcm,
            P_d=out.P_d,
            P_pcm=out.P_pcm,
            Q_hx=q_ext,
            Q_in=q_in,
            Q_out=q_out,
            s_d=zr[lay.s_d],
            s_pcm=zr[lay.s_pcm],
            T_c_j1=out.temps[:, 0],
            T_c_d=out.temps[:, 1],
            T_c_hx=out.temps[:, 2],
            T_c_j2=out.temps[:, 3],
            T_c_pcm=out.temps[:, 4],
        )

    def encode(
        self, design: PcmDesign, controls: ControlSequence, traj: Trajectory
    ) -> np.ndarray:
        """Pack a simulated trajectory into a scaled decision vector."""
        lay = self.layout
        z = np.zeros(self.n_vars)
        z[lay.C_pcm] = design.C_pcm / SCALE_ENERGY
        z[lay.T_m] = design.T_m / SCALE_TEMP
        if lay.Q_hx.size:
            z[lay.Q_hx] = controls.Q_hx / SCALE_POWER
        if lay.v1.size:
            z[lay.v1] = controls.v1
            z[lay.v2] = controls.v2
        z[lay.E_d] = traj.E_d / SCALE_ENERGY
        z[lay.E_pcm] = traj.E_pcm / SCALE_ENERGY
        z[lay.s_d] = traj.s_d / SCALE_ENERGY
        z[lay.s_pcm] = traj.s_pcm / SCALE_ENERGY
        return z

    def encode_rollout(
        self, design: PcmDesign, controls: ControlSequence
    ) -> np.ndarray:
        """Simulate the controls and encode the result (zero defects)."""
        traj = rollout(self.scenario, design, controls)
        return self.encode(design, controls, traj)

    # ------------------------------------------------------------------
    # evaluation
    # ------------------------------------------------------------------

    def evaluate(self, z: np.ndarray) -> EvalPoint:
        """Objective, equality residuals, gradient and Jacobian at z."""
        z = np.asarray(z, dtype=float)
        if z.shape != (self.n_vars,):
            raise ValidationError(f"decision vector must have length {self.n_vars}")
        sc = self.scenario
        prof, params, w = sc.profile, sc.params, sc.weights
        lay = self.layout
        dt = prof.dt
        n = prof.N
        n1 = n - 1
        zr = self.raw(z)

        C = zr[lay.C_pcm]
        T_m = zr[lay.T_m]
        q_fix, v1_fix, v2_fix = self._fixed_controls
        q = zr[lay.Q_hx] if lay.Q_hx.size else q_fix
        v1 = zr[lay.v1] if lay.v1.size else v1_fix
        v2 = zr[lay.v2] if lay.v2.size else v2_fix
        e_d = zr[lay.E_d]
        e_pcm = zr[lay.E_pcm]
        s_d = zr[lay.s_d]
        s_pcm = zr[lay.s_pcm]

        t_d = e_d[:n1] / params.C_d
        out = coolant_batch(params, T_m, t_d, q, v1, v2, sensitivities=True)
        p_d, p_pcm = out.P_d, out.P_pcm
        q_in = self._q_in
        q_out = params.h_inf * params.A_s * (t_d - prof.T_inf[:n1]) + (
            params.eta_pv * q_in
        )

        s_res = 1.0 / SCALE_ENERGY
        res = np.empty(self.n_eq)
        res[0] = (e_d[0] - params.C_d * sc.initial.T_d0) * s_res
        res[1] = (e_pcm[0] - sc.initial.SOC0 * C) * s_res
        res[2 : 2 + n1] = (e_d[1:] - e_d[:n1] - dt * (q_in - q_out - p_d)) * s_res
        res[2 + n1 :] = (e_pcm[1:] - e_pcm[:n1] - dt * p_pcm) * s_res

        # objective internals (raw Joules), left-endpoint rectangles
        t_f = prof.t_f
        j_ie = float(np.sum(q) * dt)
        j_ce = -float(np.sum(p_d) * dt)
        j_cv_d = float(np.sum(s_d[:n1]) * dt / t_f)
        j_cv_p = float(np.sum(s_pcm[:n1]) * dt / t_f)
        j_d = w.w_ie * j_ie + w.w_ce * j_ce + w.w_cv_d * j_cv_d + w.w_cv_p * j_cv_p
        j_s = w.w_m * C  # the nominal-duty term defaults to zero
        j_tot = total_objective(j_d, j_s, w)
        f = j_tot * self.objective_scale

        # gradient
        dJ_dJd = w.w_d * (w.n * j_d ** (w.n - 1.0) if w.n != 1.0 else 1.0)
        dJ_dJs = w.w_s * (w.n * j_s ** (w.n - 1.0) if w.n != 1.0 else 1.0)
        g = np.zeros(self.n_vars)
        sens_pd = out.dP_d    # columns: T_d, T_m, Q_hx, v1, v2
        sens_pp = out.dP_pcm
        ce_coef = -w.w_ce * dt  # d j_ce / d p_d,k
        g[lay.E_d[:n1]] += dJ_dJd * ce_coef * sens_pd[:, 0] / params.C_d
        g[lay.T_m] += dJ_dJd * ce_coef * np.sum(sens_pd[:, 1])
        if lay.Q_hx.size:
            g[lay.Q_hx] += dJ_dJd * (w.w_ie * dt + ce_coef * sens_pd[:, 2])
        if lay.v1.size:
            g[lay.v1] += dJ_dJd * ce_coef * sens_pd[:, 3]
            g[lay.v2] += dJ_dJd * ce_coef * sens_pd[:, 4]
        g[lay.s_d[:n1]] += dJ_dJd * w.w_cv_d * dt / t_f
        g[lay.s_pcm[:n1]] += dJ_dJd * w.w_cv_p * dt / t_f
        g[lay.C_pcm] += dJ_dJs * w.w_m
        g *= self.objective_scale * self.scale

        # Jacobian values in the precomputed pattern order
        rows, cols, slots = self._jac_pattern
        vals = np.empty(rows.shape[0])
        dq_out = params.h_inf * params.A_s / params.C_d  # d q_out / d e_d
        vals[slots["ic"]] = (1.0, 1.0, -sc.initial.SOC0)
        # device defects: E_d[k+1], E_d[k], T_m, then controls if free
        vals[slots["d_next"]] = 1.0
        vals[slots["d_curr"]] = -1.0 + dt * (dq_out + sens_pd[:, 0] / params.C_d)
        vals[slots["d_tm"]] = dt * sens_pd[:, 1] * (SCALE_TEMP / SCALE_ENERGY)
        # pcm defects: E_pcm[k+1], E_pcm[k], E_d[k], T_m, controls
        vals[slots["p_next"]] = 1.0
        vals[slots["p_curr"]] = -1.0
        vals[slots["p_ed"]] = -dt * sens_pp[:, 0] / params.C_d
        vals[slots["p_tm"]] = -dt * sens_pp[:, 1] * (SCALE_TEMP / SCALE_ENERGY)
        if lay.Q_hx.size:
            vals[slots["d_q"]] = dt * sens_pd[:, 2] * (SCALE_POWER / SCALE_ENERGY)
            vals[slots["p_q"]] = -dt * sens_pp[:, 2] * (SCALE_POWER / SCALE_ENERGY)
        if lay.v1.size:
            vals[slots["d_v1"]] = dt * sens_pd[:, 3] / SCALE_ENERGY
            vals[slots["d_v2"]] = dt * sens_pd[:, 4] / SCALE_ENERGY
            vals[slots["p_v1"]] = -dt * sens_pp[:, 3] / SCALE_ENERGY
            vals[slots["p_v2"]] = -dt * sens_pp[:, 4] / SCALE_ENERGY
        jac = TripletMatrix(self.n_eq, self.n_vars, rows, cols, vals)
        return EvalPoint(z=z, objective=f, residuals=res, gradient=g, jacobian=jac)

    # solver protocol ---------------------------------------------------

    def full_eval(self, z: np.ndarray) -> EvalPoint:
        return self.evaluate(z)

    def inequalities(self) -> tuple[TripletMatrix, np.ndarray]:
        return self.ineq

    def sample_start(self, index: int, rng: np.random.Generator) -> np.ndarray:
        """Feasible warm start: sample design and controls, roll them out.

        Start 0 is the nominal design with mid-range controls; later starts
        sample uniformly inside the bounds.  States always satisfy the
        dynamics exactly and slacks are the exact violations, so every
        start is feasible in all constraints.
        """
        b = self.scenario.bounds
        n1 = self.N - 1
        pol = self.scenario.policy
        if index == 0:
            design = self.nominal_design
            q = np.full(n1, pol.Q_hx if pol.q_fixed else 0.5 * (b.Q_hx_lb + b.Q_hx_ub))
            v1 = np.full(n1, pol.v1 if pol.valves_fixed else 0.5 * (b.v_lb + b.v_ub))
            v2 = np.full(n1, pol.v2 if pol.valves_fixed else 0.5 * (b.v_lb + b.v_ub))
        else:
            design = PcmDesign(
                C_pcm=rng.uniform(b.C_pcm_lb, b.C_pcm_ub),
                T_m=rng.uniform(b.T_m_lb, b.T_m_ub),
            )
            q = (
                rng.uniform(b.Q_hx_lb, b.Q_hx_ub, n1)
                if not pol.q_fixed
                else np.full(n1, pol.Q_hx)
            )
            if pol.valves_fixed:
                v1 = np.full(n1, pol.v1)
                v2 = np.full(n1, pol.v2)
            else:
                v1 = rng.uniform(b.v_lb, b.v_ub, n1)
                v2 = rng.uniform(b.v_lb, b.v_ub, n1)
        controls = ControlSequence(Q_hx=q, v1=v1, v2=v2)
        return self.encode_rollout(design, controls)

    def polish(self, z: np.ndarray) -> np.ndarray:
        """Snap slack variables to the exact violations of the z-states.

        The objective is nondecreasing in every slack and each slack only
        relaxes its own two one-sided rows, so this never worsens a point
        and restores slack exactness at knots the objective does not touch
        (the terminal one).
        """
        zr = self.raw(z)
        lay = self.layout
        b = self.scenario.bounds
        C = zr[lay.C_pcm]
        out = z.copy()
        out[lay.s_d] = (
            interval_slacks(zr[lay.E_d], b.E_d_lb, b.E_d_ub) / SCALE_ENERGY
        )
        out[lay.s_pcm] = (
            interval_slacks(zr[lay.E_pcm], b.E_pcm_lb_frac * C, b.E_pcm_ub_frac * C)
            / SCALE_ENERGY
        )
        return out

    def summarize(self, z: np.ndarray) -> dict:
        """Objective breakdown plus selected design, for result reports."""
        design, _, traj = self.decode(z)
        breakdown = evaluate_objectives(traj, design, self.scenario.weights)
        out = breakdown.as_dict()
        out["C_pcm"] = design.C_pcm
        out["T_m"] = design.T_m
        return out

    # ------------------------------------------------------------------
    # verification helpers
    # ------------------------------------------------------------------

    def fd_gradients(self, z: np.ndarray, h: float = 1e-6):
        """Central finite differences of objective and residuals (fallback).

        Slow dense reference path; for tests and for debugging new plant
        models whose analytic sensitivities are in doubt.
        """
        z = np.asarray(z, dtype=float)
        g = np.zeros(self.n_vars)
        J = np.zeros((self.n_eq, self.n_vars))
        for i in range(self.n_vars):
            zp = z.copy()
            zp[i] += h
            ep = self.evaluate(zp)
            zm = z.copy()
            zm[i] -= h
            em = self.evaluate(zm)
            g[i] = (ep.objective - em.objective) / (2 * h)
            J[:, i] = (ep.residuals - em.residuals) / (2 * h)
        return g, J

    def describe(self) -> dict:
        """JSON-ready dump of layout, bounds and constraint counts."""
        blocks = {
            name: [int(ix.min()), int(ix.max()) + 1] if ix.size else []
            for name, ix in self.layout.blocks().items()
        }
        A, b = self.ineq
        return {
            "n_vars": self.n_vars,
            "n_eq": self.n_eq,
            "n_ineq": int(b.shape[0]),
            "layout": blocks,
            "scaled_lower": [float(x) for x in self.lower],
            "scaled_upper": [float(x) for x in self.upper],
        }


def assemble(scenario: Scenario, nominal_design: PcmDesign | None = None) -> NlpProblem:
    """Build the NLP for a scenario.

    The control policy decides which control blocks become decision
    variables; fixed blocks are folded into the evaluators as constants.
    The objective is normalized by its magnitude at the start-0 nominal
    rollout so solver tolerances mean the same thing across weightings.
    """
    prof = scenario.profile
    b = scenario.bounds
    pol = scenario.policy
    n = prof.N
    n1 = n - 1

    if nominal_design is None:
        nominal_design = PcmDesign(
            C_pcm=0.5 * (b.C_pcm_lb + b.C_pcm_ub),
            T_m=0.5 * (b.T_m_lb + b.T_m_ub),
        )

    idx = 0

    def take(count):
        nonlocal idx
        out = np.arange(idx, idx + count)
        idx += count
        return out

    c_ix = int(take(1)[0])
    t_ix = int(take(1)[0])
    q_ix = take(n1) if not pol.q_fixed else np.empty(0, dtype=np.intp)
    v1_ix = take(n1) if not pol.valves_fixed else np.empty(0, dtype=np.intp)
    v2_ix = take(n1) if not pol.valves_fixed else np.empty(0, dtype=np.intp)
    e_d_ix = take(n)
    e_pcm_ix = take(n)
    s_d_ix = take(n)
    s_pcm_ix = take(n)
    layout = VariableLayout(
        C_pcm=c_ix,
        T_m=t_ix,
        Q_hx=q_ix,
        v1=v1_ix,
        v2=v2_ix,
        E_d=e_d_ix,
        E_pcm=e_pcm_ix,
        s_d=s_d_ix,
        s_pcm=s_pcm_ix,
        n_vars=idx,
    )

    scale = np.ones(idx)
    scale[layout.C_pcm] = SCALE_ENERGY
    scale[layout.T_m] = SCALE_TEMP
    if layout.Q_hx.size:
        scale[layout.Q_hx] = SCALE_POWER
    for block in (layout.E_d, layout.E_pcm, layout.s_d, layout.s_pcm):
        scale[block] = SCALE_ENERGY

    lower = np.full(idx, -np.inf)
    upper = np.full(idx, np.inf)
    lower[layout.C_pcm] = b.C_pcm_lb / SCALE_ENERGY
    upper[layout.C_pcm] = b.C_pcm_ub / SCALE_ENERGY
    lower[layout.T_m] = b.T_m_lb / SCALE_TEMP
    upper[layout.T_m] = b.T_m_ub / SCALE_TEMP
    if layout.Q_hx.size:
        lower[layout.Q_hx] = b.Q_hx_lb / SCALE_POWER
        upper[layout.Q_hx] = b.Q_hx_ub / SCALE_POWER
    if layout.v1.size:
        for block in (layout.v1, layout.v2):
            lower[block] = b.v_lb
            upper[block] = b.v_ub
    for block in (layout.s_d, layout.s_pcm):
        lower[block] = 0.0
    # stored energies are bounded only through the slack inequality rows

    n_eq = 2 + 2 * n1

    # equality Jacobian sparsity pattern, grouped by slot for fast refresh
    rows, cols = [], []
    slots = {}

    def add(slot, r, c):
        start = len(rows)
        rows.extend(np.atleast_1d(r).tolist())
        cols.extend(np.atleast_1d(c).tolist())
        if slot is not None:
            slots[slot] = np.arange(start, len(rows))

    # initial conditions: E_d,0 pinned; E_pcm,0 tied to SOC0 * C_pcm
    add("ic", [0, 1, 1], [layout.E_d[0], layout.E_pcm[0], layout.C_pcm])
    d_rows = 2 + np.arange(n1)
    p_rows = 2 + n1 + np.arange(n1)
    add("d_next", d_rows, layout.E_d[1:])
    add("d_curr", d_rows, layout.E_d[:n1])
    add("d_tm", d_rows, np.full(n1, layout.T_m))
    add("p_next", p_rows, layout.E_pcm[1:])
    add("p_curr", p_rows, layout.E_pcm[:n1])
    add("p_ed", p_rows, layout.E_d[:n1])
    add("p_tm", p_rows, np.full(n1, layout.T_m))
    if layout.Q_hx.size:
        add("d_q", d_rows, layout.Q_hx)
        add("p_q", p_rows, layout.Q_hx)
    if layout.v1.size:
        add("d_v1", d_rows, layout.v1)
        add("d_v2", d_rows, layout.v2)
        add("p_v1", p_rows, layout.v1)
        add("p_v2", p_rows, layout.v2)
    pattern = (np.asarray(rows, dtype=np.intp), np.asarray(cols, dtype=np.intp), slots)

    # linear inequality rows A z + b0 >= 0, scaled by 1/SCALE_ENERGY;
    # block order: E_d lower, E_d upper, E_pcm lower, E_pcm upper
    s_row = 1.0 / SCALE_ENERGY
    ir, ic, iv, off = [], [], [], []

    def ineq_block(e_block, s_block, sign_e, c_coef, const):
        base = len(off)
        for k in range(n):
            r = base + k
            ir.extend([r, r])
            ic.extend([e_block[k], s_block[k]])
            iv.extend([sign_e, 1.0])  # energy and slack columns (scaled to O(1))
            if c_coef != 0.0:
                ir.append(r)
                ic.append(layout.C_pcm)
                iv.append(c_coef)
            off.append(const * s_row)

    ineq_block(layout.E_d, layout.s_d, 1.0, 0.0, -b.E_d_lb)
    ineq_block(layout.E_d, layout.s_d, -1.0, 0.0, b.E_d_ub)
    ineq_block(layout.E_pcm, layout.s_pcm, 1.0, -b.E_pcm_lb_frac, 0.0)
    ineq_block(layout.E_pcm, layout.s_pcm, -1.0, b.E_pcm_ub_frac, 0.0)
    A_in = TripletMatrix(len(off), idx, ir, ic, iv)
    b_in = np.asarray(off)

    fixed = (
        np.full(n1, pol.Q_hx) if pol.q_fixed else None,
        np.full(n1, pol.v1) if pol.valves_fixed else None,
        np.full(n1, pol.v2) if pol.valves_fixed else None,
    )
    q_in_knots = scenario.params.alpha * scenario.params.A_s * prof.G[:n1]

    problem = NlpProblem(
        scenario=scenario,
        layout=layout,
        scale=scale,
        lower=lower,
        upper=upper,
        n_eq=n_eq,
        ineq=(A_in, b_in),
        nominal_design=nominal_design,
        _jac_pattern=pattern,
        _fixed_controls=fixed,
        _q_in=q_in_knots,
    )

    z_nom = problem.sample_start(0, np.random.default_rng(0))
    j_nom = problem.evaluate(z_nom).objective
    problem.objective_scale = 1.0 / max(1.0, abs(j_nom))
    return problem


def evaluate(problem: NlpProblem, z: np.ndarray) -> EvalPoint:
    """Module-level alias for NlpProblem.evaluate."""
    return problem.evaluate(z)
