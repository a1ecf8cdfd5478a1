"""Scenario definitions: disturbances, bounds, weights, policies, defaults.

A Scenario bundles everything that frames one simulation or optimization
run except the PCM design itself (which is either given, for simulation,
or selected by the optimizer).  Scenarios are immutable after construction
and safe to share across threads.
"""

from __future__ import annotations

import configparser
import io
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from .errors import ConfigError, ProfileFormatError, ValidationError
from .plant import PcmDesign, PlantParams

PROFILE_HEADER = "t_s,G_wm2,T_inf_c"
CONFIG_SCHEMA_VERSION = 1

# Internal weight applied to the two bound-violation objectives in the
# bundled case-study configurations.  The violation objectives are time
# averages while the effort/effectiveness objectives are time integrals;
# at equal weights a whole-horizon average can never outweigh the terminal
# storage reward, so sustained violations would be tolerated and active
# cooling would never pay for itself.  A weight of 30 makes violations
# lasting more than a couple of minutes dominate the storage reward while
# staying far below the point where they would also veto the capacity
# economics (that takes roughly w_s * t_f / T_viol ~ 360 under the static
# weighting).
CASE_STUDY_VIOLATION_WEIGHT = 30.0


@dataclass(frozen=True)
class DisturbanceProfile:
    """Knotted boundary disturbances: irradiance and ambient temperature.

    Attributes:
        dt: knot spacing (s).
        G: irradiance at each knot (W/m^2), length N.
        T_inf: ambient temperature at each knot (degC), length N.
    """

    dt: float
    G: np.ndarray
    T_inf: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "G", np.asarray(self.G, dtype=float))
        object.__setattr__(self, "T_inf", np.asarray(self.T_inf, dtype=float))
        if not self.dt > 0.0:
            raise ValidationError("profile dt must be strictly positive")
        if self.G.ndim != 1 or self.T_inf.shape != self.G.shape:
            raise ValidationError("G and T_inf must be 1-d sequences of equal length")
        if self.N < 2:
            raise ValidationError("profile needs at least two knots")
        if np.any(self.G < 0.0):
            raise ValidationError("irradiance must be nonnegative")

    @property
    def N(self) -> int:
        return int(self.G.shape[0])

    @property
    def t(self) -> np.ndarray:
        """Knot times (s)."""
        return self.dt * np.arange(self.N)

    @property
    def t_f(self) -> float:
        """Horizon length (s)."""
        return self.dt * (self.N - 1)


@dataclass(frozen=True)
class Bounds:
    """Box bounds of the optimization problem.

    PCM energy bounds are stored as fractions of C_pcm because the
    capacity is itself a decision variable.
    """

    E_d_lb: float
    E_d_ub: float
    E_pcm_lb_frac: float
    E_pcm_ub_frac: float
    v_lb: float
    v_ub: float
    Q_hx_lb: float
    Q_hx_ub: float
    C_pcm_lb: float
    C_pcm_ub: float
    T_m_lb: float
    T_m_ub: float

    def __post_init__(self):
        pairs = [
            ("E_d", self.E_d_lb, self.E_d_ub),
            ("E_pcm_frac", self.E_pcm_lb_frac, self.E_pcm_ub_frac),
            ("v", self.v_lb, self.v_ub),
            ("Q_hx", self.Q_hx_lb, self.Q_hx_ub),
            ("C_pcm", self.C_pcm_lb, self.C_pcm_ub),
            ("T_m", self.T_m_lb, self.T_m_ub),
        ]
        for name, lb, ub in pairs:
            if lb > ub:
                raise ValidationError(f"Bounds.{name}: lower bound exceeds upper")
        if not (0.0 <= self.E_pcm_lb_frac and self.E_pcm_ub_frac <= 1.0):
            raise ValidationError("PCM energy fractions must lie in [0, 1]")


@dataclass(frozen=True)
class Weights:
    """Objective weights: outer (w_d, w_s), exponent n, and internal weights."""

    w_d: float = 1.0
    w_s: float = 1.0
    n: float = 1.0
    w_ie: float = 1.0
    w_ce: float = 1.0
    w_cv_d: float = 1.0
    w_cv_p: float = 1.0
    w_m: float = 1.0
    w_nom: float = 0.0

    def __post_init__(self):
        for name in ("w_d", "w_s", "w_ie", "w_ce", "w_cv_d", "w_cv_p", "w_m", "w_nom"):
            if getattr(self, name) < 0.0:
                raise ValidationError(f"Weights.{name} must be nonnegative")
        if self.n < 1.0:
            raise ValidationError("Weights.n must be at least 1")


POLICY_KINDS = ("all_fixed", "fixed_valves", "free")


@dataclass(frozen=True)
class ControlPolicy:
    """Which control sequences are decision variables.

    all_fixed    -- both valves and Q_hx held at fixed values (pure
                    simulation, or design-only optimization).
    fixed_valves -- valves held fixed, Q_hx optimized.
    free         -- all three control sequences optimized.
    """

    kind: str = "all_fixed"
    v1: float = 0.0
    v2: float = 1.0
    Q_hx: float = 0.0

    def __post_init__(self):
        if self.kind not in POLICY_KINDS:
            raise ValidationError(f"policy kind must be one of {POLICY_KINDS}")

    @property
    def valves_fixed(self) -> bool:
        return self.kind in ("all_fixed", "fixed_valves")

    @property
    def q_fixed(self) -> bool:
        return self.kind == "all_fixed"


@dataclass(frozen=True)
class InitialState:
    """Initial condition given as device temperature and PCM melt fraction.

    Stored this way (rather than as a Joule pair) so the PCM side scales
    with whatever capacity the optimizer selects.
    """

    T_d0: float
    SOC0: float


@dataclass(frozen=True)
class Scenario:
    """Complete frame for one run: plant, disturbances, bounds, weights."""

    params: PlantParams
    profile: DisturbanceProfile
    bounds: Bounds
    weights: Weights
    initial: InitialState
    policy: ControlPolicy = field(default_factory=ControlPolicy)

    def __post_init__(self):
        b = self.bounds
        e_d0 = self.params.C_d * self.initial.T_d0
        if not b.E_d_lb <= e_d0 <= b.E_d_ub:
            raise ValidationError(
                f"initial device energy {e_d0:g} J outside [{b.E_d_lb:g}, {b.E_d_ub:g}]"
            )
        if not b.E_pcm_lb_frac <= self.initial.SOC0 <= b.E_pcm_ub_frac:
            raise ValidationError("initial melt fraction outside its bound fractions")
        p = self.policy
        if p.valves_fixed and not (
            b.v_lb <= p.v1 <= b.v_ub and b.v_lb <= p.v2 <= b.v_ub
        ):
            raise ValidationError("fixed valve commands violate the valve bounds")
        if p.q_fixed and not b.Q_hx_lb <= p.Q_hx <= b.Q_hx_ub:
            raise ValidationError("fixed Q_hx violates its bounds")

    def initial_energies(self, design: PcmDesign) -> tuple[float, float]:
        """Initial (E_d, E_pcm) in Joules for a concrete design."""
        return (
            self.params.C_d * self.initial.T_d0,
            design.C_pcm * self.initial.SOC0,
        )

    def with_weights(self, **kw) -> "Scenario":
        return replace(self, weights=replace(self.weights, **kw))


# ---------------------------------------------------------------------------
# Profile construction and CSV interchange
# ---------------------------------------------------------------------------

def synth_profile(
    duration_s: float = 3600.0,
    dt: float = 60.0,
    G_base: float = 950.0,
    G_drop: float = 350.0,
    drop_window: tuple[float, float] = (3000.0, 3600.0),
    T_inf_base: float = 33.0,
) -> DisturbanceProfile:
    """Piecewise-constant irradiance with a cloud-cover drop near the end.

    The defaults stand in for a measured mid-day profile; they are
    configuration, not ground truth.  Knots inside [drop_start, drop_end]
    (inclusive) take the drop value; ambient temperature is constant.
    """
    lo, hi = drop_window
    if not (0.0 <= lo <= hi <= duration_s):
        raise ValidationError(
            f"drop window [{lo:g}, {hi:g}] must lie inside [0, {duration_s:g}]"
        )
    n_steps = duration_s / dt
    if abs(n_steps - round(n_steps)) > 1e-9:
        raise ValidationError("duration_s must be an integer multiple of dt")
    n = int(round(n_steps)) + 1
    t = dt * np.arange(n)
    G = np.where((t >= lo) & (t <= hi), G_drop, G_base).astype(float)
    T_inf = np.full(n, float(T_inf_base))
    return DisturbanceProfile(dt=float(dt), G=G, T_inf=T_inf)


def load_profile_csv(path) -> DisturbanceProfile:
    """Read a disturbance profile from `t_s,G_wm2,T_inf_c` CSV.

    Rows must be uniformly spaced in time; the offending data row (1-based,
    header excluded) is named in every parse error.
    """
    path = Path(path)
    text = path.read_text(encoding="utf-8")
    lines = [ln for ln in text.splitlines() if ln.strip() != ""]
    if not lines or lines[0].strip() != PROFILE_HEADER:
        raise ProfileFormatError(
            f"{path}: expected header '{PROFILE_HEADER}', "
            f"got {lines[0].strip() if lines else 'empty file'!r}"
        )
    rows = []
    for i, ln in enumerate(lines[1:], start=1):
        parts = ln.split(",")
        if len(parts) != 3:
            raise ProfileFormatError(f"{path}: expected 3 columns at row {i}")
        try:
            rows.append(tuple(float(p) for p in parts))
        except ValueError as exc:
            raise ProfileFormatError(f"{path}: non-numeric value at row {i}") from exc
    if len(rows) < 2:
        raise ProfileFormatError(f"{path}: at least two samples required")
    t = np.array([r[0] for r in rows])
    dt = t[1] - t[0]
    if dt <= 0.0:
        raise ProfileFormatError(f"{path}: non-monotone time at row 2")
    for i in range(1, len(rows)):
        step = t[i] - t[i - 1]
        if step <= 0.0:
            raise ProfileFormatError(f"{path}: non-monotone time at row {i + 1}")
        if abs(step - dt) > 1e-9 * max(1.0, dt):
            raise ProfileFormatError(f"{path}: non-uniform timestep at row {i + 1}")
    return DisturbanceProfile(
        dt=float(dt),
        G=np.array([r[1] for r in rows]),
        T_inf=np.array([r[2] for r in rows]),
    )


def write_profile_csv(profile: DisturbanceProfile, path) -> None:
    """Write a profile in canonical form: shortest round-trip floats, LF."""
    buf = io.StringIO()
    buf.write(PROFILE_HEADER + "\n")
    t = profile.t
    for k in range(profile.N):
        buf.write(
            f"{float(t[k])!r},{float(profile.G[k])!r},{float(profile.T_inf[k])!r}\n"
        )
    Path(path).write_text(buf.getvalue(), encoding="utf-8", newline="\n")


# ---------------------------------------------------------------------------
# Canonical configurations
# ---------------------------------------------------------------------------

def default_params() -> PlantParams:
    """Reference plant constants of the PV cooling-loop study."""
    return PlantParams(
        C_d=4580.0,
        hA_dc=21.42,
        hA_cpcm=21.42,
        m_dot_d=1.794,
        c_p=1370.0,
        alpha=0.7,
        A_s=0.8,
        h_inf=13.39,
        eta_pv=0.2,
    )


def default_bounds() -> Bounds:
    return Bounds(
        E_d_lb=45800.0,
        E_d_ub=229000.0,
        E_pcm_lb_frac=0.0,
        E_pcm_ub_frac=1.0,
        v_lb=0.0,
        v_ub=1.0,
        Q_hx_lb=0.0,
        Q_hx_ub=100.0,
        C_pcm_lb=5e5,
        C_pcm_ub=6e6,
        T_m_lb=20.0,
        T_m_ub=50.0,
    )


def default_case_study() -> Scenario:
    """The canonical one-hour PV scenario with reference constants.

    Internal weights are all 1 except w_nom = 0; the outer weights default
    to 1 and are overridden per experiment.  The passive fixed-valve policy
    (PCM-only loop, exchanger bypassed, Q_hx = 0) is the default.
    """
    return Scenario(
        params=default_params(),
        profile=synth_profile(),
        bounds=default_bounds(),
        weights=Weights(),
        initial=InitialState(T_d0=35.0, SOC0=0.5),
        policy=ControlPolicy(kind="all_fixed", v1=0.0, v2=1.0, Q_hx=0.0),
    )


def case_study_scenario(case: int, weighting: str) -> Scenario:
    """One of the four bundled experiments.

    case 1 runs the passive loop (valves fixed at v1=0, v2=1, no exchanger
    load); case 2 half-routes the stream through the exchanger (v1=1,
    v2=0.5) and optimizes Q_hx.  `weighting` picks the outer emphasis:
    "static" (w_s=100, w_d=1) or "dynamic" (w_s=1, w_d=100).
    """
    if case not in (1, 2):
        raise ValidationError("case must be 1 or 2")
    if weighting not in ("static", "dynamic"):
        raise ValidationError("weighting must be 'static' or 'dynamic'")
    base = default_case_study()
    if case == 1:
        policy = ControlPolicy(kind="all_fixed", v1=0.0, v2=1.0, Q_hx=0.0)
    else:
        policy = ControlPolicy(kind="fixed_valves", v1=1.0, v2=0.5)
    w_d, w_s = (1.0, 100.0) if weighting == "static" else (100.0, 1.0)
    weights = Weights(
        w_d=w_d,
        w_s=w_s,
        w_cv_d=CASE_STUDY_VIOLATION_WEIGHT,
        w_cv_p=CASE_STUDY_VIOLATION_WEIGHT,
    )
    return replace(base, policy=policy, weights=weights)


def default_design() -> PcmDesign:
    """Neutral design used when a config does not provide one."""
    return PcmDesign(C_pcm=5e5, T_m=30.0)


# ---------------------------------------------------------------------------
# Config files
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class RunConfig:
    """Everything a CLI command needs: scenario, design, solver overrides."""

    scenario: Scenario
    design: PcmDesign
    solver: dict


def _parser() -> configparser.ConfigParser:
    cp = configparser.ConfigParser(inline_comment_prefixes=("#", ";"))
    cp.optionxform = str  # keep keys case-sensitive: they mirror field names
    return cp


def _section(cp, name, path):
    if not cp.has_section(name):
        raise ConfigError(f"{path}: missing [{name}] section")
    return dict(cp[name])


def _floats(raw: dict, path: str, section: str) -> dict:
    out = {}
    for key, val in raw.items():
        try:
            out[key] = float(val)
        except ValueError as exc:
            raise ConfigError(
                f"{path}: [{section}] {key} = {val!r} is not a number"
            ) from exc
    return out


def _build(cls, raw: dict, path: str, section: str):
    try:
        return cls(**_floats(raw, path, section))
    except TypeError as exc:
        raise ConfigError(f"{path}: [{section}] has wrong keys: {exc}") from exc
    except ValidationError as exc:
        raise ConfigError(f"{path}: [{section}] invalid: {exc}") from exc


def load_config(path) -> RunConfig:
    """Parse a scenario config file.

    The format is INI-style key = value with one section per scenario
    component; keys mirror the dataclass field names exactly.  See the
    bundled configs for the full schema.
    """
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"config file not found: {path}")
    cp = _parser()
    try:
        cp.read_string(path.read_text(encoding="utf-8"))
    except configparser.Error as exc:
        raise ConfigError(f"{path}: {exc}") from exc

    meta = _section(cp, "meta", path)
    version = meta.get("schema_version")
    if version != str(CONFIG_SCHEMA_VERSION):
        raise ConfigError(
            f"{path}: schema_version {version!r} unsupported "
            f"(expected {CONFIG_SCHEMA_VERSION})"
        )

    params = _build(PlantParams, _section(cp, "plant", path), path, "plant")
    bounds = _build(Bounds, _section(cp, "bounds", path), path, "bounds")
    weights = _build(Weights, _section(cp, "weights", path), path, "weights")
    initial = _build(InitialState, _section(cp, "initial", path), path, "initial")
    design = _build(PcmDesign, _section(cp, "design", path), path, "design")

    praw = _section(cp, "policy", path)
    kind = praw.pop("kind", "all_fixed")
    try:
        policy = ControlPolicy(kind=kind, **_floats(praw, path, "policy"))
    except ValidationError as exc:
        raise ConfigError(f"{path}: [policy] invalid: {exc}") from exc

    prof_raw = _section(cp, "profile", path)
    source = prof_raw.pop("source", "synthetic")
    if source == "csv":
        file_ = prof_raw.get("file", "")
        if not file_:
            raise ConfigError(f"{path}: [profile] source=csv requires file=")
        csv_path = Path(file_)
        if not csv_path.is_absolute():
            csv_path = path.parent / csv_path
        profile = load_profile_csv(csv_path)
    elif source == "synthetic":
        vals = _floats(prof_raw, path, "profile")
        try:
            profile = synth_profile(
                duration_s=vals.get("duration_s", 3600.0),
                dt=vals.get("dt_s", 60.0),
                G_base=vals.get("G_base", 950.0),
                G_drop=vals.get("G_drop", 350.0),
                drop_window=(
                    vals.get("drop_start_s", 3000.0),
                    vals.get("drop_end_s", 3600.0),
                ),
                T_inf_base=vals.get("T_inf", 33.0),
            )
        except ValidationError as exc:
            raise ConfigError(f"{path}: [profile] invalid: {exc}") from exc
    else:
        raise ConfigError(f"{path}: [profile] source must be synthetic or csv")

    solver = {}
    if cp.has_section("solver"):
        for key, val in cp["solver"].items():
            if key in ("n_starts", "seed", "max_iter"):
                solver[key] = int(val)
            else:
                solver[key] = float(val)

    try:
        scenario = Scenario(
            params=params,
            profile=profile,
            bounds=bounds,
            weights=weights,
            initial=initial,
            policy=policy,
        )
    except ValidationError as exc:
        raise ConfigError(f"{path}: inconsistent scenario: {exc}") from exc
    return RunConfig(scenario=scenario, design=design, solver=solver)


def save_config(config: RunConfig, path, profile_csv: str | None = None) -> None:
    """Write a RunConfig back out in the documented key = value schema.

    When the profile came from a CSV file, pass its (relative) path via
    `profile_csv`; otherwise the profile is emitted as a synthetic block
    reproducing the knot grid only if it is recognizably synthetic-shaped,
    else it is written to `<path>.profile.csv` and referenced.
    """
    path = Path(path)
    sc = config.scenario
    cp = _parser()
    cp["meta"] = {"schema_version": str(CONFIG_SCHEMA_VERSION)}
    cp["plant"] = {k: repr(getattr(sc.params, k)) for k in (
        "C_d", "hA_dc", "hA_cpcm", "m_dot_d", "c_p", "alpha", "A_s", "h_inf", "eta_pv"
    )}
    cp["design"] = {
        "C_pcm": repr(config.design.C_pcm),
        "T_m": repr(config.design.T_m),
    }
    if profile_csv is None:
        csv_name = path.name + ".profile.csv"
        write_profile_csv(sc.profile, path.parent / csv_name)
        profile_csv = csv_name
    cp["profile"] = {"source": "csv", "file": profile_csv}
    cp["bounds"] = {k: repr(getattr(sc.bounds, k)) for k in (
        "E_d_lb", "E_d_ub", "E_pcm_lb_frac", "E_pcm_ub_frac", "v_lb", "v_ub",
        "Q_hx_lb", "Q_hx_ub", "C_pcm_lb", "C_pcm_ub", "T_m_lb", "T_m_ub"
    )}
    cp["weights"] = {k: repr(getattr(sc.weights, k)) for k in (
        "w_d", "w_s", "n", "w_ie", "w_ce", "w_cv_d", "w_cv_p", "w_m", "w_nom"
    )}
    cp["initial"] = {
        "T_d0": repr(sc.initial.T_d0),
        "SOC0": repr(sc.initial.SOC0),
    }
    cp["policy"] = {
        "kind": sc.policy.kind,
        "v1": repr(sc.policy.v1),
        "v2": repr(sc.policy.v2),
        "Q_hx": repr(sc.policy.Q_hx),
    }
    if config.solver:
        cp["solver"] = {k: str(v) for k, v in config.solver.items()}
    buf = io.StringIO()
    cp.write(buf)
    path.write_text(buf.getvalue(), encoding="utf-8", newline="\n")
