"""Augmented-Lagrangian solver tests on problems with known answers."""

from dataclasses import replace

import numpy as np

from pcm_forge.plant import PcmDesign
from pcm_forge.scenario import case_study_scenario, synth_profile
from pcm_forge.solver import GenericProblem, SolveOptions, solve, verify
from pcm_forge.transcription import assemble


def qp_problem():
    """min ||z||^2  s.t. sum(z) = 1, box [-10, 10]^5; optimum z = 0.2 * ones."""

    def objective(z):
        return float(z @ z), 2.0 * z

    def equalities(z):
        return np.array([np.sum(z) - 1.0]), np.ones((1, z.size))

    return GenericProblem(
        n_vars=5,
        lower=np.full(5, -10.0),
        upper=np.full(5, 10.0),
        objective=objective,
        equalities=equalities,
    )


def rosenbrock_problem():
    """min rosenbrock(x, y)  s.t. x + y = 1, box [-0.4, 2] x [-2, 2].

    The x lower bound excludes the second stationary point of the
    restricted objective (a corner local minimum near x = -1), so the
    feasible segment holds a single basin and every start must land on it.
    """

    def objective(z):
        x, y = z
        f = (1.0 - x) ** 2 + 100.0 * (y - x * x) ** 2
        g = np.array(
            [
                -2.0 * (1.0 - x) - 400.0 * x * (y - x * x),
                200.0 * (y - x * x),
            ]
        )
        return float(f), g

    def equalities(z):
        return np.array([z[0] + z[1] - 1.0]), np.ones((1, 2))

    return GenericProblem(
        n_vars=2,
        lower=np.array([-0.4, -2.0]),
        upper=np.array([2.0, 2.0]),
        objective=objective,
        equalities=equalities,
    )


def rosenbrock_line_oracle():
    """Brute-force grid refinement of rosenbrock along y = 1 - x."""

    def f(x):
        return (1.0 - x) ** 2 + 100.0 * (1.0 - x - x * x) ** 2

    lo, hi = -0.4, 2.0
    for _ in range(40):
        xs = np.linspace(lo, hi, 2001)
        k = int(np.argmin(f(xs)))
        lo = xs[max(0, k - 1)]
        hi = xs[min(len(xs) - 1, k + 1)]
    x = 0.5 * (lo + hi)
    return np.array([x, 1.0 - x])


def test_qp_every_start_converges():
    problem = qp_problem()
    result = solve(problem, SolveOptions(n_starts=8, seed=3))
    assert result.status == "optimal"
    assert np.max(np.abs(result.z_star - 0.2)) < 1e-6
    for s in result.starts:
        assert s.status == "optimal"
        assert np.max(np.abs(s.z - 0.2)) < 1e-6


def test_rosenbrock_constrained_matches_grid_oracle():
    problem = rosenbrock_problem()
    z_ref = rosenbrock_line_oracle()
    result = solve(problem, SolveOptions(n_starts=8, seed=5))
    assert result.status == "optimal"
    assert np.max(np.abs(result.z_star - z_ref)) < 1e-4
    for s in result.starts:
        assert np.max(np.abs(s.z - z_ref)) < 1e-4


def test_determinism_byte_identical():
    problem = qp_problem()
    opts = SolveOptions(n_starts=4, seed=11)
    r1 = solve(problem, opts)
    r2 = solve(problem, opts)
    assert r1.to_json() == r2.to_json()


def test_outer_loop_violation_never_backslides_beyond_tolerance():
    problem = qp_problem()
    result = solve(problem, SolveOptions(n_starts=2, seed=0))
    for s in result.starts:
        hist = [h for h in s.history if isinstance(h, dict)]
        for prev, cur in zip(hist, hist[1:]):
            assert cur["violation"] <= prev["violation"] + prev["inner_tol"] + 1e-12


def test_multi_start_dominance():
    problem = rosenbrock_problem()
    result = solve(problem, SolveOptions(n_starts=6, seed=9))
    tol = 1e-6
    for s in result.starts:
        if max(s.max_eq_residual, s.max_ineq_violation) <= tol:
            assert result.objective <= s.objective + 1e-12


def small_case_study(weighting="static"):
    sc = case_study_scenario(1, weighting)
    prof = synth_profile(720, 60, 950, 350, (600, 720), 33)
    return replace(sc, profile=prof)


def test_transcription_solve_and_verify_small():
    sc = small_case_study()
    problem = assemble(sc, nominal_design=PcmDesign(C_pcm=1e6, T_m=35.0))
    opts = SolveOptions(n_starts=3, seed=1)
    result = solve(problem, opts)
    assert result.status == "optimal"
    assert result.max_eq_residual <= opts.constraint_tol
    assert result.max_ineq_violation <= opts.constraint_tol
    # static weighting drives capacity to its floor on this short horizon too
    assert result.breakdown["C_pcm"] <= 1.01 * sc.bounds.C_pcm_lb

    diag = verify(problem, result)
    assert diag["reported_residual_gap"] <= 1e-12
    assert diag["objective_gap_rel"] <= 1e-6
    assert diag["slack_discrepancy_J"] <= opts.constraint_tol * 1e5

    # decoded controls re-simulate to matching trajectories
    assert diag["state_gap_max_J"] <= 1.0


def test_verify_reports_residuals_of_hand_built_point():
    sc = small_case_study()
    problem = assemble(sc)
    rng = np.random.default_rng(6)
    z = problem.sample_start(1, rng)
    z[problem.layout.E_d[3]] += 0.5  # break one defect on purpose
    ep = problem.full_eval(z)
    fake = solve(problem, SolveOptions(n_starts=1, seed=0, max_outer=1))
    fake.z_star = z
    fake.max_eq_residual = float(np.max(np.abs(ep.residuals)))
    diag = verify(problem, fake)
    assert diag["max_eq_residual"] > 0.1
    assert diag["reported_residual_gap"] <= 1e-12


def test_solver_reports_per_start_logs():
    problem = qp_problem()
    result = solve(problem, SolveOptions(n_starts=2, seed=0))
    assert any("start 0" in line for line in result.log)
    assert any("start 1" in line for line in result.log)
    assert result.winner_start in (0, 1)


def test_infeasible_problem_is_reported():
    # sum(z) = 1 with box forcing sum <= 0.5: no feasible point
    def objective(z):
        return float(z @ z), 2.0 * z

    def equalities(z):
        return np.array([np.sum(z) - 1.0]), np.ones((1, z.size))

    problem = GenericProblem(
        n_vars=2,
        lower=np.full(2, -10.0),
        upper=np.full(2, 0.25),
        objective=objective,
        equalities=equalities,
    )
    result = solve(problem, SolveOptions(n_starts=2, seed=2, max_outer=12))
    assert result.status == "infeasible"
    assert result.max_eq_residual > 1e-6
