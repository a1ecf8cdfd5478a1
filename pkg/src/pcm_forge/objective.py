"""Energy-based objective terms and their weighted aggregation.

Every internal objective carries units of Joules, which keeps the weight
space interpretable:

    J_ie      integral of external cooling effort Q_hx
    J_ce      negated integral of heat extracted from the device
    J_cv_d    time-averaged device energy-bound violation
    J_cv_pcm  time-averaged PCM energy-bound violation
    J_m       storage capacity (the mass proxy)
    J_nom     negated nominal-duty credit

Dynamic integrals use the left-endpoint rectangular rule over the N-1
intervals, matching the forward-Euler discretization of the dynamics, so
a constant integrand averages to itself.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass
from pathlib import Path

import numpy as np

from .errors import ValidationError
from .plant import PcmDesign
from .scenario import Weights
from .simulate import Trajectory


@dataclass(frozen=True)
class ObjectiveBreakdown:
    """All internal objectives plus their weighted aggregates."""

    J_ie: float
    J_ce: float
    J_cv_d: float
    J_cv_pcm: float
    J_m: float
    J_nom: float
    J_d: float
    J_s: float
    J_tot: float

    def as_dict(self) -> dict:
        return asdict(self)


def dynamic_objectives(
    traj: Trajectory, weights: Weights
) -> tuple[float, float, float, float, float]:
    """Integrate the four dynamic internals and aggregate them into J_d."""
    dt = traj.dt
    t_f = traj.t_f
    n1 = traj.N - 1
    j_ie = float(np.sum(traj.Q_hx[:n1]) * dt)
    j_ce = -float(np.sum(traj.P_d[:n1]) * dt)
    j_cv_d = float(np.sum(traj.s_d[:n1]) * dt / t_f)
    j_cv_pcm = float(np.sum(traj.s_pcm[:n1]) * dt / t_f)
    j_d = (
        weights.w_ie * j_ie
        + weights.w_ce * j_ce
        + weights.w_cv_d * j_cv_d
        + weights.w_cv_p * j_cv_pcm
    )
    return j_ie, j_ce, j_cv_d, j_cv_pcm, j_d


def static_objectives(
    design: PcmDesign,
    weights: Weights,
    P_pcm_nom: float = 0.0,
    t_nom: float = 0.0,
) -> tuple[float, float, float]:
    """Static internals: capacity (mass proxy) and nominal-duty credit.

    The nominal cooling-duty term needs a rated power and duration; no
    reference values exist for the bundled study (its weight defaults to
    zero), so both default to zero and the term is kept for completeness.
    """
    j_m = design.C_pcm
    j_nom = 0.0 - P_pcm_nom * t_nom  # avoids the -0.0 artifact when zero
    j_s = weights.w_m * j_m + weights.w_nom * j_nom
    return j_m, j_nom, j_s


def total_objective(j_d: float, j_s: float, weights: Weights) -> float:
    """J_tot = w_d * J_d**n + w_s * J_s**n.

    For n > 1 (compromise weighting) both aggregates must be nonnegative;
    a negative aggregate has no principled n-th power and indicates the
    internal weights need rebalancing.
    """
    n = weights.n
    if n != 1.0 and (j_d < 0.0 or j_s < 0.0):
        raise ValidationError(
            "n > 1 requires nonnegative aggregates "
            f"(J_d={j_d:g}, J_s={j_s:g}); rebalance the internal weights"
        )
    if n == 1.0:
        return weights.w_d * j_d + weights.w_s * j_s
    return weights.w_d * j_d**n + weights.w_s * j_s**n


def evaluate(
    traj: Trajectory,
    design: PcmDesign,
    weights: Weights,
    P_pcm_nom: float = 0.0,
    t_nom: float = 0.0,
) -> ObjectiveBreakdown:
    """Full breakdown for one trajectory and design."""
    j_ie, j_ce, j_cv_d, j_cv_pcm, j_d = dynamic_objectives(traj, weights)
    j_m, j_nom, j_s = static_objectives(design, weights, P_pcm_nom, t_nom)
    return ObjectiveBreakdown(
        J_ie=j_ie,
        J_ce=j_ce,
        J_cv_d=j_cv_d,
        J_cv_pcm=j_cv_pcm,
        J_m=j_m,
        J_nom=j_nom,
        J_d=j_d,
        J_s=j_s,
        J_tot=total_objective(j_d, j_s, weights),
    )


def aggregate(breakdown: ObjectiveBreakdown, weights: Weights) -> ObjectiveBreakdown:
    """Recompute the aggregates of a stored breakdown from its internals."""
    j_d = (
        weights.w_ie * breakdown.J_ie
        + weights.w_ce * breakdown.J_ce
        + weights.w_cv_d * breakdown.J_cv_d
        + weights.w_cv_p * breakdown.J_cv_pcm
    )
    j_s = weights.w_m * breakdown.J_m + weights.w_nom * breakdown.J_nom
    return ObjectiveBreakdown(
        J_ie=breakdown.J_ie,
        J_ce=breakdown.J_ce,
        J_cv_d=breakdown.J_cv_d,
        J_cv_pcm=breakdown.J_cv_pcm,
        J_m=breakdown.J_m,
        J_nom=breakdown.J_nom,
        J_d=j_d,
        J_s=j_s,
        J_tot=total_objective(j_d, j_s, weights),
    )


def breakdown_json(breakdown: ObjectiveBreakdown, weights: Weights) -> str:
    """Serialize a breakdown with the weight vector that produced it."""
    payload = {
        "objectives": breakdown.as_dict(),
        "weights": asdict(weights),
    }
    return json.dumps(payload, indent=2, sort_keys=False)


def write_breakdown_json(
    breakdown: ObjectiveBreakdown, weights: Weights, path
) -> None:
    Path(path).write_text(breakdown_json(breakdown, weights) + "\n", encoding="utf-8")


def load_breakdown_json(path) -> tuple[ObjectiveBreakdown, Weights]:
    payload = json.loads(Path(path).read_text(encoding="utf-8"))
    return (
        ObjectiveBreakdown(**payload["objectives"]),
        Weights(**payload["weights"]),
    )
