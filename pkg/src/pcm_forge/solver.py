"""Multi-start augmented-Lagrangian solver for the transcribed problem.

Each start runs an augmented-Lagrangian outer loop over the equality
constraints (general inequalities are first converted to equalities with
nonnegative slack variables that join the bound set), with scipy's
L-BFGS-B as the bound-constrained quasi-Newton inner solver.  Multiplier
and penalty updates follow the classical two-track schedule: accept and
update multipliers when the constraint violation beats the current gate,
otherwise raise the penalty; inner tolerances tighten as the gate drops.

Starts are warm: the problem object supplies feasible initial points
(for transcriptions, rolled-out trajectories that satisfy the dynamics
exactly).  Everything is seeded and sequential, so a given seed yields a
byte-identical result.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize

from .errors import SolverEvalError, PcmForgeError
from .triplets import TripletMatrix

_BIG = 1e30  # finite sentinel for failed evaluations inside a line search


@dataclass(frozen=True)
class SolveOptions:
    """Solver controls.

    Tolerances apply in the problem's scaled coordinates.  The outer loop
    drives the constraint violation two orders below `constraint_tol`
    (floored at 1e-12) so that decoded solutions re-simulate cleanly.
    """

    max_fun_evals: int = 1_000_000
    max_iter: int = 300_000
    step_tol: float = 1e-6
    constraint_tol: float = 1e-6
    n_starts: int = 8
    seed: int = 0
    penalty_init: float = 10.0
    penalty_growth: float = 10.0
    # subproblems always solve to full stationarity; the acceptance gate
    # starts at penalty**-0.1 and tightens by penalty**-0.9 per accepted
    # round, with the penalty grown on gate failure or slow contraction
    inner_tol_schedule: str = "fixed-stationarity/tightening-gate"
    max_outer: int = 40

    def __post_init__(self):
        if self.step_tol <= 0.0 or self.constraint_tol <= 0.0:
            raise ValueError("tolerances must be positive")
        if self.n_starts < 1:
            raise ValueError("n_starts must be at least 1")


@dataclass
class StartReport:
    """Outcome of one start, kept for logs and dominance checks."""

    index: int
    status: str
    objective: float
    max_eq_residual: float
    max_ineq_violation: float
    first_order_opt: float
    iterations: int
    evaluations: int
    history: list = field(default_factory=list)
    z: np.ndarray | None = None


@dataclass
class SolveResult:
    """Best result across starts plus feasibility diagnostics."""

    z_star: np.ndarray
    objective: float
    breakdown: dict | None
    max_eq_residual: float
    max_ineq_violation: float
    first_order_opt: float
    iterations: int
    evaluations: int
    winner_start: int
    status: str
    starts: list = field(default_factory=list)
    log: list = field(default_factory=list)

    def to_json(self) -> str:
        payload = {
            "status": self.status,
            "objective": float(self.objective),
            "breakdown": self.breakdown,
            "max_eq_residual": float(self.max_eq_residual),
            "max_ineq_violation": float(self.max_ineq_violation),
            "first_order_opt": float(self.first_order_opt),
            "iterations": int(self.iterations),
            "evaluations": int(self.evaluations),
            "winner_start": int(self.winner_start),
            "starts": [
                {
                    "index": s.index,
                    "status": s.status,
                    "objective": float(s.objective),
                    "max_eq_residual": float(s.max_eq_residual),
                    "max_ineq_violation": float(s.max_ineq_violation),
                    "first_order_opt": float(s.first_order_opt),
                    "iterations": int(s.iterations),
                    "evaluations": int(s.evaluations),
                }
                for s in self.starts
            ],
            "z_star": [float(x) for x in self.z_star],
            "log": self.log,
        }
        return json.dumps(payload, indent=2)


class GenericProblem:
    """Adapter giving plain callables the solver's problem protocol.

    objective(z) -> (f, grad); equalities(z) -> (c, dense_or_triplet_jac);
    inequality rows, when present, are the constant linear system
    A z + b >= 0.
    """

    def __init__(self, n_vars, lower, upper, objective, equalities=None, ineq=None):
        self.n_vars = n_vars
        self.lower = np.asarray(lower, dtype=float)
        self.upper = np.asarray(upper, dtype=float)
        self._objective = objective
        self._equalities = equalities
        self._ineq = None
        if ineq is not None:
            A, b = ineq
            A = A if isinstance(A, TripletMatrix) else TripletMatrix.from_dense(A)
            self._ineq = (A, np.asarray(b, dtype=float))

    def full_eval(self, z):
        f, g = self._objective(z)
        if self._equalities is None:
            c = np.zeros(0)
            J = TripletMatrix(0, self.n_vars, [], [], [])
        else:
            c, J = self._equalities(z)
            c = np.atleast_1d(np.asarray(c, dtype=float))
            if not isinstance(J, TripletMatrix):
                J = TripletMatrix.from_dense(np.atleast_2d(J))
        return _GenericEval(z, float(f), np.asarray(g, dtype=float), c, J)

    def inequalities(self):
        return self._ineq

    def sample_start(self, index, rng):
        lo = np.where(np.isfinite(self.lower), self.lower, -1.0)
        hi = np.where(np.isfinite(self.upper), self.upper, 1.0)
        if index == 0:
            return 0.5 * (lo + hi)
        return rng.uniform(lo, hi)


@dataclass
class _GenericEval:
    z: np.ndarray
    objective: float
    gradient: np.ndarray
    residuals: np.ndarray
    jacobian: TripletMatrix


def _projected_gradient_norm(z, grad, lower, upper):
    return float(np.max(np.abs(z - np.clip(z - grad, lower, upper)), initial=0.0))


def _solve_start(problem, z0, options: SolveOptions, index: int):
    n = problem.n_vars
    ineq = problem.inequalities() if hasattr(problem, "inequalities") else None
    if ineq is not None:
        A_in, b_in = ineq
        m_in = b_in.shape[0]
    else:
        A_in, b_in, m_in = None, None, 0

    try:
        ep0 = problem.full_eval(z0)
    except PcmForgeError as exc:
        return StartReport(
            index=index,
            status="eval-failure",
            objective=np.inf,
            max_eq_residual=np.inf,
            max_ineq_violation=np.inf,
            first_order_opt=np.inf,
            iterations=0,
            evaluations=1,
            history=[f"start {index}: initial evaluation failed: {exc}"],
        )
    m_eq = ep0.residuals.shape[0]

    if m_in:
        sigma0 = np.clip(A_in.matvec(z0) + b_in, 0.0, None)
        w = np.concatenate([z0, sigma0])
    else:
        w = np.asarray(z0, dtype=float).copy()

    bounds = [(lo if np.isfinite(lo) else None, hi if np.isfinite(hi) else None)
              for lo, hi in zip(problem.lower, problem.upper)]
    bounds += [(0.0, None)] * m_in

    lam = np.zeros(m_eq + m_in)
    mu = options.penalty_init
    gate = 1.0 / mu**0.1
    feas_target = max(0.01 * options.constraint_tol, 1e-12)
    # every subproblem is solved to full stationarity: these problems are
    # cheap to evaluate and loose early subproblems leave the first outer
    # iterations parked far from the right active set
    opt_floor = 0.1 * options.step_tol

    evals = 0
    iters = 0
    history = []
    last_ep = [ep0]

    def split(w_):
        return (w_[:n], w_[n:]) if m_in else (w_, None)

    def constraints(ep, z_, sigma_):
        if m_in:
            return np.concatenate([ep.residuals, A_in.matvec(z_) + b_in - sigma_])
        return ep.residuals

    def merit(w_):
        nonlocal evals
        evals += 1
        z_, sigma_ = split(w_)
        try:
            ep = problem.full_eval(z_)
        except PcmForgeError:
            return _BIG, np.zeros_like(w_)
        last_ep[0] = ep
        c = constraints(ep, z_, sigma_)
        y = -lam + mu * c
        f = ep.objective - float(lam @ c) + 0.5 * mu * float(c @ c)
        gz = ep.gradient + ep.jacobian.rmatvec(y[:m_eq])
        if m_in:
            gz = gz + A_in.rmatvec(y[m_eq:])
            gs = -y[m_eq:]
            return f, np.concatenate([gz, gs])
        return f, gz

    status = "feasible-stalled"
    w_prev = w.copy()
    viol_prev = np.inf
    for outer in range(1, options.max_outer + 1):
        budget = options.max_fun_evals - evals
        if budget <= 0 or iters >= options.max_iter:
            break
        res = minimize(
            merit,
            w,
            jac=True,
            method="L-BFGS-B",
            bounds=bounds,
            options={
                "maxiter": min(6000 if outer == 1 else 2500, options.max_iter - iters),
                "maxfun": budget,
                "gtol": opt_floor,
                "ftol": 1e-16,
                "maxcor": 30,
            },
        )
        w = np.asarray(res.x)
        iters += int(res.nit)
        z_, sigma_ = split(w)
        try:
            ep = problem.full_eval(z_)
        except PcmForgeError:
            break
        c = constraints(ep, z_, sigma_)
        viol = float(np.max(np.abs(c), initial=0.0))
        step = float(np.linalg.norm(w - w_prev))
        history.append(
            {
                "outer": outer,
                "objective": float(ep.objective),
                "violation": viol,
                "penalty": float(mu),
                "step": step,
                "inner_tol": float(opt_floor),
                "inner_iters": int(res.nit),
            }
        )
        converged_inner = bool(res.success) or res.nit == 0
        if viol <= max(gate, feas_target):
            lam = lam - mu * c
            if viol <= feas_target and converged_inner:
                status = "optimal"
                break
            if viol > 0.25 * viol_prev:
                # multiplier updates alone are converging too slowly
                mu = min(mu * options.penalty_growth, 1e12)
            gate = max(min(gate / mu**0.9, 0.25 * viol), feas_target)
        else:
            mu = min(mu * options.penalty_growth, 1e12)
            gate = max(1.0 / mu**0.1, feas_target)
        # a tiny step only means convergence once the feasibility target
        # is met; before that, penalty escalation keeps the loop alive
        if step <= options.step_tol and outer > 1 and viol <= feas_target:
            status = "optimal"
            break
        viol_prev = viol
        w_prev = w.copy()

    z_final, sigma_final = split(w)
    if hasattr(problem, "polish"):
        z_final = problem.polish(z_final)

    ep = problem.full_eval(z_final)
    evals += 1
    max_eq = float(np.max(np.abs(ep.residuals), initial=0.0))
    if m_in:
        g_in = A_in.matvec(z_final) + b_in
        max_in = float(max(0.0, -np.min(g_in, initial=0.0)))
    else:
        max_in = 0.0
    grad_l = ep.gradient - ep.jacobian.rmatvec(lam[:m_eq])
    if m_in:
        grad_l = grad_l - A_in.rmatvec(lam[m_eq:])
    pg = _projected_gradient_norm(z_final, grad_l, problem.lower, problem.upper)

    feasible = max(max_eq, max_in) <= options.constraint_tol
    if status != "optimal":
        status = "feasible-stalled" if feasible else "infeasible"
    elif not feasible:
        status = "infeasible"
    return StartReport(
        index=index,
        status=status,
        objective=float(ep.objective),
        max_eq_residual=max_eq,
        max_ineq_violation=max_in,
        first_order_opt=pg,
        iterations=iters,
        evaluations=evals,
        history=history,
        z=z_final,
    )


def solve(problem, options: SolveOptions | None = None) -> SolveResult:
    """Run the multi-start augmented-Lagrangian solve.

    Returns the lowest-objective start among those meeting the constraint
    tolerance (ties broken by start index); if none is feasible, the
    least-infeasible start is reported with status "infeasible".
    """
    options = options or SolveOptions()
    rng = np.random.default_rng(options.seed)
    starts: list[StartReport] = []
    log: list[str] = []
    for i in range(options.n_starts):
        z0 = problem.sample_start(i, rng)
        report = _solve_start(problem, z0, options, i)
        starts.append(report)
        for h in report.history:
            if isinstance(h, str):
                log.append(h)
            else:
                log.append(
                    f"start {i} outer {h['outer']:2d}  "
                    f"obj {h['objective']: .9e}  viol {h['violation']:.3e}  "
                    f"penalty {h['penalty']:.1e}  step {h['step']:.3e}"
                )
        log.append(
            f"start {i} done: {report.status}, obj {report.objective:.9e}, "
            f"viol {max(report.max_eq_residual, report.max_ineq_violation):.3e}, "
            f"{report.evaluations} evals"
        )

    attempted = [s for s in starts if s.status != "eval-failure"]
    if not attempted:
        raise SolverEvalError(
            "every start failed to evaluate; logs: "
            + " | ".join(str(s.history[0]) for s in starts)
        )
    feasible = [
        s
        for s in attempted
        if max(s.max_eq_residual, s.max_ineq_violation) <= options.constraint_tol
    ]
    if feasible:
        winner = min(feasible, key=lambda s: (s.objective, s.index))
        status = winner.status
    else:
        winner = min(
            attempted, key=lambda s: (max(s.max_eq_residual, s.max_ineq_violation), s.index)
        )
        status = "infeasible"

    breakdown = None
    if hasattr(problem, "summarize"):
        breakdown = problem.summarize(winner.z)

    return SolveResult(
        z_star=winner.z,
        objective=winner.objective,
        breakdown=breakdown,
        max_eq_residual=winner.max_eq_residual,
        max_ineq_violation=winner.max_ineq_violation,
        first_order_opt=winner.first_order_opt,
        iterations=sum(s.iterations for s in starts),
        evaluations=sum(s.evaluations for s in starts),
        winner_start=winner.index,
        status=status,
        starts=starts,
        log=log,
    )


def verify(problem, result: SolveResult) -> dict:
    """Independent diagnostics of a solve result.

    Re-evaluates the reported point, re-simulates the decoded controls
    through the forward simulator, and reports the objective gap between
    the transcription's decoded trajectory and the re-simulated one, plus
    the worst slack-versus-violation discrepancy.  Gaps are reported, not
    raised.
    """
    from .objective import evaluate as objective_evaluate
    from .simulate import interval_slacks, rollout

    ep = problem.full_eval(result.z_star)
    diag = {
        "reported_residual_gap": float(
            abs(np.max(np.abs(ep.residuals), initial=0.0) - result.max_eq_residual)
        ),
        "max_eq_residual": float(np.max(np.abs(ep.residuals), initial=0.0)),
    }
    if not hasattr(problem, "decode"):
        return diag

    design, controls, decoded = problem.decode(result.z_star)
    scenario = problem.scenario
    sim = rollout(scenario, design, controls)
    b_dec = objective_evaluate(decoded, design, scenario.weights)
    b_sim = objective_evaluate(sim, design, scenario.weights)
    gap = abs(b_dec.J_tot - b_sim.J_tot) / max(1.0, abs(b_dec.J_tot))
    b = scenario.bounds
    slack_gap_d = np.max(
        np.abs(decoded.s_d - interval_slacks(decoded.E_d, b.E_d_lb, b.E_d_ub))
    )
    e_lo = b.E_pcm_lb_frac * design.C_pcm
    e_hi = b.E_pcm_ub_frac * design.C_pcm
    slack_gap_p = np.max(
        np.abs(decoded.s_pcm - interval_slacks(decoded.E_pcm, e_lo, e_hi))
    )
    diag.update(
        {
            "objective_decoded": float(b_dec.J_tot),
            "objective_resimulated": float(b_sim.J_tot),
            "objective_gap_rel": float(gap),
            "state_gap_max_J": float(
                max(
                    np.max(np.abs(decoded.E_d - sim.E_d)),
                    np.max(np.abs(decoded.E_pcm - sim.E_pcm)),
                )
            ),
            "slack_discrepancy_J": float(max(slack_gap_d, slack_gap_p)),
        }
    )
    return diag
