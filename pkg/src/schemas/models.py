"""
Pydantic schemas for the event-based spin simulator.
Every domain value is validated at construction time.
"""

import math
from datetime import datetime
from enum import Enum
from typing import Any, Literal, NamedTuple, Optional

from pydantic import BaseModel, ConfigDict, Field, field_serializer, field_validator, model_validator

from ..config import get_settings
from ..errors import InvariantViolation

TWO_PI = 2.0 * math.pi
UNIT_TOLERANCE = 1e-12
PROBABILITY_TOLERANCE = 1e-12

Vector3 = tuple[float, float, float]
Sign = Literal[-1, 1]

AXIS_X: Vector3 = (1.0, 0.0, 0.0)
AXIS_Y: Vector3 = (0.0, 1.0, 0.0)
AXIS_Z: Vector3 = (0.0, 0.0, 1.0)

SETTING_PAIRS: tuple[tuple[int, int], ...] = ((1, 1), (1, -1), (-1, 1), (-1, -1))
SETTING_TRIPLES: tuple[tuple[int, int, int], ...] = tuple(
    (s1, s2, s3) for s1 in (1, -1) for s2 in (1, -1) for s3 in (1, -1)
)


def reduce_phase(value: float) -> float:
    """Reduce an angle to [0, 2π)."""
    r = math.fmod(value, TWO_PI)
    if r < 0.0:
        r += TWO_PI
    if r >= TWO_PI:
        r = 0.0
    return r


def vector_norm(v: Vector3) -> float:
    return math.sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2])


def parse_moment(text: str) -> Vector3:
    """Parse `x|y|z|ax,ay,az` into a 3-vector."""
    named = {"x": AXIS_X, "y": AXIS_Y, "z": AXIS_Z}
    key = text.strip().lower()
    if key in named:
        return named[key]
    parts = key.split(",")
    if len(parts) != 3:
        raise ValueError(f"Moment must be x, y, z or ax,ay,az: {text!r}")
    try:
        vec = tuple(float(p) for p in parts)
    except ValueError as e:
        raise ValueError(f"Moment components must be numbers: {text!r}") from e
    if not all(math.isfinite(c) for c in vec):
        raise ValueError(f"Moment components must be finite: {text!r}")
    return vec  # type: ignore[return-value]


def _check_unit(v: Vector3, what: str) -> Vector3:
    if abs(vector_norm(v) - 1.0) > UNIT_TOLERANCE:
        raise ValueError(f"{what} must have unit norm, got {vector_norm(v)!r}")
    return v


# ============== Enumerations ==============

class AnalyzerModel(str, Enum):
    """Event rule used by a spin analyzer."""
    PROBABILISTIC = "probabilistic"
    DLM = "dlm"


class AnalyzerMode(str, Enum):
    """What happens to the x = -1 branch."""
    ABSORBING = "absorbing"    # messenger destroyed
    SPLITTING = "splitting"    # messenger sent to the other beam


class ExperimentKind(str, Enum):
    UNCERTAINTY_SWEEP = "uncertainty-sweep"
    FILTERING_TRIPLE = "filtering-triple"
    ROBERTSON_SWEEP = "robertson-sweep"
    ORACLE_TABLE = "oracle-table"


class OutputFormat(str, Enum):
    CSV = "csv"
    JSON = "json"


# ============== Spin Schemas ==============

class Message(BaseModel):
    """Per-messenger state: two phases and the polar angle of the moment."""
    psi1: float = Field(..., description="First phase, radians in [0, 2π)")
    psi2: float = Field(..., description="Second phase, radians in [0, 2π)")
    theta: float = Field(..., ge=0.0, le=math.pi, description="Polar angle")

    model_config = ConfigDict(frozen=True)

    @field_validator("psi1", "psi2")
    @classmethod
    def reduce_phases(cls, v: float) -> float:
        """Keep phases bounded."""
        if not math.isfinite(v):
            raise ValueError("Phase must be finite")
        return reduce_phase(v)

    @property
    def phi(self) -> float:
        """Azimuth of the moment, ψ⁽¹⁾ − ψ⁽²⁾."""
        return self.psi1 - self.psi2


class MagneticMoment(BaseModel):
    """Unit vector giving the direction of the magnetic moment."""
    mx: float
    my: float
    mz: float

    model_config = ConfigDict(frozen=True)

    @model_validator(mode="after")
    def check_unit_norm(self) -> "MagneticMoment":
        _check_unit(self.as_tuple(), "Magnetic moment")
        return self

    def as_tuple(self) -> Vector3:
        return (self.mx, self.my, self.mz)

    @classmethod
    def from_vector(cls, v: Any) -> "MagneticMoment":
        return cls(mx=float(v[0]), my=float(v[1]), mz=float(v[2]))


class RotationSpec(BaseModel):
    """Axis and angle of a field region acting on the moment."""
    axis: Vector3
    angle: float

    model_config = ConfigDict(frozen=True)

    @field_validator("axis")
    @classmethod
    def validate_axis(cls, v: Vector3) -> Vector3:
        return _check_unit(v, "Rotation axis")


# ============== Device Schemas ==============

class SourceConfig(BaseModel):
    """The source emits every messenger with the same initial moment a."""
    initial_moment: MagneticMoment

    model_config = ConfigDict(frozen=True, extra="forbid")


class AnalyzerConfig(BaseModel):
    """Static configuration of one spin analyzer."""
    axis: Vector3 = AXIS_Z
    orientation: Sign = 1
    model: AnalyzerModel = AnalyzerModel.PROBABILISTIC
    gamma: float = Field(default=0.999, description="DLM learning parameter")
    mode: AnalyzerMode = AnalyzerMode.ABSORBING
    initial_u: float = Field(default=0.0, ge=-1.0, le=1.0, description="DLM starting state")

    model_config = ConfigDict(frozen=True, extra="forbid")

    @field_validator("axis")
    @classmethod
    def validate_axis(cls, v: Vector3) -> Vector3:
        return _check_unit(v, "Analyzer axis")

    @model_validator(mode="after")
    def validate_gamma(self) -> "AnalyzerConfig":
        if self.model is AnalyzerModel.DLM and not 0.0 <= self.gamma < 1.0:
            raise ValueError(f"DLM gamma must lie in [0, 1), got {self.gamma}")
        return self


class AnalyzerState(BaseModel):
    """Mutable state owned by one analyzer for the duration of one run."""
    internal_u: float = Field(default=0.0, ge=-1.0, le=1.0)
    stream_key: Optional[str] = None
    events: int = Field(default=0, ge=0)


class DetectorCounter(BaseModel):
    """Detection count; never decreases within a run."""
    count: int = Field(default=0, ge=0)

    model_config = ConfigDict(frozen=True)


class Pass(BaseModel):
    """Messenger left the analyzer along +S·axis."""
    message: Message

    model_config = ConfigDict(frozen=True)


class Absorb(BaseModel):
    """Messenger destroyed by an absorbing analyzer."""
    model_config = ConfigDict(frozen=True)


class Branch(BaseModel):
    """Messenger sent to beam x by a splitting analyzer."""
    x: Sign
    message: Message

    model_config = ConfigDict(frozen=True)


AnalyzerOutcome = Pass | Absorb | Branch


# ============== Experiment Schemas ==============

def _default_events() -> int:
    return get_settings().default_events


def _default_gamma() -> float:
    return get_settings().default_gamma


def _default_warmup() -> int:
    return get_settings().dlm_warmup_events


def _default_initial_u() -> float:
    return get_settings().dlm_initial_u


class StageAngles(BaseModel):
    """z-rotation angles of the stage network."""
    theta1: float = 0.0
    theta2: float
    theta3: float = 0.0
    theta4: float
    theta5: float = 0.0

    model_config = ConfigDict(frozen=True)

    @classmethod
    def from_detuning(cls, phi: float, theta3: float = 0.0, theta5: float = 0.0) -> "StageAngles":
        """θ1 = 0, θ2 = φ + π/2, θ4 = −φ − π/2."""
        return cls(
            theta1=0.0,
            theta2=phi + math.pi / 2,
            theta3=theta3,
            theta4=-phi - math.pi / 2,
            theta5=theta5,
        )


def _repeated(values: tuple[float, ...]) -> float:
    """First value that occurs earlier in the tuple."""
    return next(v for i, v in enumerate(values) if v in values[:i])


class UncertaintyRunConfig(BaseModel):
    """Configuration of the two-analyzer detuning experiment."""
    initial_moment: MagneticMoment = MagneticMoment(mx=1.0, my=0.0, mz=0.0)
    detuning_grid: tuple[float, ...] = Field(..., min_length=1)
    events_per_setting: int = Field(default_factory=_default_events, ge=1)
    analyzer_model: AnalyzerModel = AnalyzerModel.PROBABILISTIC
    gamma: float = Field(default_factory=_default_gamma, ge=0.0, lt=1.0)
    master_seed: int = Field(..., ge=0)
    warmup_events: int = Field(default_factory=_default_warmup, ge=0)
    initial_u: float = Field(default_factory=_default_initial_u, ge=-1.0, le=1.0)
    theta3: float = 0.0
    theta5: float = 0.0
    explicit_stage_one: bool = False

    model_config = ConfigDict(frozen=True, extra="forbid")

    @field_validator("detuning_grid")
    @classmethod
    def validate_grid(cls, v: tuple[float, ...]) -> tuple[float, ...]:
        if not all(math.isfinite(phi) for phi in v):
            raise ValueError("Detuning angles must be finite")
        if len(set(v)) != len(v):
            raise ValueError(f"Detuning grid repeats an angle: {_repeated(v)}")
        return v

    @property
    def effective_warmup(self) -> int:
        """Warm-up only applies to the learning analyzers."""
        return self.warmup_events if self.analyzer_model is AnalyzerModel.DLM else 0


class RobertsonRunConfig(BaseModel):
    """Configuration of the single-analyzer Robertson sweep."""
    az_grid: tuple[float, ...] = Field(..., min_length=1)
    events_per_axis: int = Field(default_factory=_default_events, ge=1)
    master_seed: int = Field(..., ge=0)
    analyzer_model: AnalyzerModel = AnalyzerModel.PROBABILISTIC
    gamma: float = Field(default_factory=_default_gamma, ge=0.0, lt=1.0)
    warmup_events: int = Field(default_factory=_default_warmup, ge=0)
    initial_u: float = Field(default_factory=_default_initial_u, ge=-1.0, le=1.0)

    model_config = ConfigDict(frozen=True, extra="forbid")

    @field_validator("az_grid")
    @classmethod
    def validate_az(cls, v: tuple[float, ...]) -> tuple[float, ...]:
        for az in v:
            if not -1.0 <= az <= 1.0:
                raise ValueError(f"a_z must lie in [-1, 1], got {az}")
        if len(set(v)) != len(v):
            raise ValueError(f"a_z grid repeats a value: {_repeated(v)}")
        return v

    @property
    def effective_warmup(self) -> int:
        return self.warmup_events if self.analyzer_model is AnalyzerModel.DLM else 0


class CellCount(BaseModel):
    """Outcome of N messenger lifecycles at one (S1, S2) setting."""
    s1: Sign
    s2: Sign
    emitted: int = Field(..., ge=0)
    detected: int = Field(..., ge=0)
    destroyed_first: int = Field(default=0, ge=0, description="Absorbed by SA2")
    destroyed_second: int = Field(default=0, ge=0, description="Absorbed by SA3")

    model_config = ConfigDict(frozen=True)

    @model_validator(mode="after")
    def check_conservation(self) -> "CellCount":
        if self.detected + self.destroyed != self.emitted:
            raise InvariantViolation(
                f"Setting ({self.s1},{self.s2}): detected {self.detected} + destroyed "
                f"{self.destroyed} != emitted {self.emitted}"
            )
        return self

    @property
    def destroyed(self) -> int:
        return self.destroyed_first + self.destroyed_second


class CountTable(BaseModel):
    """Detection counts N(S1,S2|a) of the four setting runs at one detuning angle."""
    phi: float
    initial_moment: Vector3
    cells: tuple[CellCount, ...]

    model_config = ConfigDict(frozen=True)

    @field_validator("cells")
    @classmethod
    def validate_cells(cls, v: tuple[CellCount, ...]) -> tuple[CellCount, ...]:
        keys = [(c.s1, c.s2) for c in v]
        if len(set(keys)) != len(keys):
            raise ValueError("Duplicate setting pair in count table")
        return v

    def cell(self, s1: int, s2: int) -> CellCount:
        for c in self.cells:
            if c.s1 == s1 and c.s2 == s2:
                return c
        return CellCount(s1=s1, s2=s2, emitted=0, detected=0)

    @property
    def counts(self) -> dict[tuple[int, int], int]:
        return {pair: self.cell(*pair).detected for pair in SETTING_PAIRS}

    @property
    def emitted(self) -> dict[tuple[int, int], int]:
        return {pair: self.cell(*pair).emitted for pair in SETTING_PAIRS}

    @property
    def destroyed(self) -> dict[tuple[int, int], int]:
        return {pair: self.cell(*pair).destroyed for pair in SETTING_PAIRS}

    @property
    def total_detected(self) -> int:
        return sum(c.detected for c in self.cells)

    @classmethod
    def from_counts(
        cls,
        counts: dict[tuple[int, int], int],
        emitted: int,
        phi: float = 0.0,
        initial_moment: Vector3 = AXIS_X,
    ) -> "CountTable":
        """Build a table whose undetected messengers were all absorbed by SA2."""
        cells = tuple(
            CellCount(
                s1=s1, s2=s2, emitted=emitted, detected=counts.get((s1, s2), 0),
                destroyed_first=emitted - counts.get((s1, s2), 0),
            )
            for s1, s2 in SETTING_PAIRS
        )
        return cls(phi=phi, initial_moment=initial_moment, cells=cells)


class TripleCountTable(BaseModel):
    """Counts in the eight output beams of the three-level filtering run."""
    counts: dict[tuple[int, int, int], int]
    emitted: int = Field(..., ge=0)

    model_config = ConfigDict(frozen=True)

    @field_validator("counts")
    @classmethod
    def fill_cells(cls, v: dict[tuple[int, int, int], int]) -> dict[tuple[int, int, int], int]:
        for key, n in v.items():
            if key not in SETTING_TRIPLES:
                raise ValueError(f"Unknown cell {key}")
            if n < 0:
                raise ValueError("Counts must be nonnegative")
        return {key: int(v.get(key, 0)) for key in SETTING_TRIPLES}

    @model_validator(mode="after")
    def check_conservation(self) -> "TripleCountTable":
        if sum(self.counts.values()) != self.emitted:
            raise InvariantViolation(
                f"Triple run lost messengers: {sum(self.counts.values())} != {self.emitted}"
            )
        return self


# ============== Oracle Schemas ==============

class TwoOutcomeDistribution(BaseModel):
    """Joint probability of the pair (S1, S2)."""
    p: dict[tuple[int, int], float]

    model_config = ConfigDict(frozen=True)

    @field_validator("p")
    @classmethod
    def validate_probabilities(cls, v: dict[tuple[int, int], float]) -> dict[tuple[int, int], float]:
        if set(v) != set(SETTING_PAIRS):
            raise ValueError("Distribution must cover the four setting pairs")
        if any(x < -PROBABILITY_TOLERANCE for x in v.values()):
            raise ValueError("Probabilities must be nonnegative")
        if abs(math.fsum(v.values()) - 1.0) > PROBABILITY_TOLERANCE:
            raise ValueError("Probabilities must sum to one")
        return v

    def probability(self, s1: int, s2: int) -> float:
        return self.p[(s1, s2)]


class TripleOutcomeDistribution(BaseModel):
    """Joint probability of the triple (S1, S2, S3)."""
    p: dict[tuple[int, int, int], float]

    model_config = ConfigDict(frozen=True)

    @field_validator("p")
    @classmethod
    def validate_probabilities(
        cls, v: dict[tuple[int, int, int], float]
    ) -> dict[tuple[int, int, int], float]:
        if set(v) != set(SETTING_TRIPLES):
            raise ValueError("Distribution must cover the eight setting triples")
        if any(x < -PROBABILITY_TOLERANCE for x in v.values()):
            raise ValueError("Probabilities must be nonnegative")
        if abs(math.fsum(v.values()) - 1.0) > PROBABILITY_TOLERANCE:
            raise ValueError("Probabilities must sum to one")
        return v

    def probability(self, s1: int, s2: int, s3: int) -> float:
        return self.p[(s1, s2, s3)]


class Expectations(NamedTuple):
    """⟨S1⟩, ⟨S2⟩, ⟨S1S2⟩."""
    s1: float
    s2: float
    s1s2: float


class TripleExpectations(NamedTuple):
    s1: float
    s2: float
    s3: float
    s1s2: float
    s1s3: float
    s2s3: float
    s1s2s3: float


class EpsilonEtaTheory(NamedTuple):
    epsilon: float
    eta: float
    sigma_a: float
    sigma_b: float


class EpsilonEtaEstimate(NamedTuple):
    epsilon: float
    eta: float
    stderr_epsilon: float
    stderr_eta: float


# ============== Statistics Schemas ==============

class FrequencyTable(BaseModel):
    """Relative frequencies F(S1,S2|a)."""
    f: dict[tuple[int, int], float]
    total_detected: int = Field(..., ge=0)

    model_config = ConfigDict(frozen=True)

    @model_validator(mode="after")
    def check_normalized(self) -> "FrequencyTable":
        if self.total_detected > 0 and abs(math.fsum(self.f.values()) - 1.0) > PROBABILITY_TOLERANCE:
            raise ValueError("Frequencies must sum to one")
        return self

    @classmethod
    def from_distribution(cls, dist: TwoOutcomeDistribution) -> "FrequencyTable":
        """Frequencies equal to the exact probabilities (infinite-N limit)."""
        return cls(f=dict(dist.p), total_detected=0)


class UncertaintyRecord(BaseModel):
    """Error-disturbance quantities at one detuning angle."""
    phi: float
    epsilon: float = Field(..., ge=0.0)
    eta: float = Field(..., ge=0.0)
    ozawa_lhs: float
    heisenberg_product: float
    bound: float = 1.0
    stderr_epsilon: float = Field(default=0.0, ge=0.0)
    stderr_eta: float = Field(default=0.0, ge=0.0)
    stderr_ozawa_lhs: float = Field(default=0.0, ge=0.0)
    stderr_product: float = Field(default=0.0, ge=0.0)

    model_config = ConfigDict(frozen=True)

    @property
    def ozawa_margin(self) -> float:
        """LHS minus bound; nonnegative when the inequality holds."""
        return self.ozawa_lhs - self.bound


class RobertsonRecord(BaseModel):
    """(1−⟨σx⟩²)(1−⟨σy⟩²) against ⟨σz⟩² for one initial state."""
    az: float
    lhs: float
    rhs: float
    stderr_lhs: float = Field(default=0.0, ge=0.0)
    stderr_rhs: float = Field(default=0.0, ge=0.0)

    model_config = ConfigDict(frozen=True)


# ============== Output Schemas ==============
# Field order is the column order of the CSV files.

class UncertaintySweepRow(BaseModel):
    phi: float
    s1: float
    s2: float
    s1s2: float
    epsilon: float
    eta: float
    ozawa_lhs: float
    heisenberg_product: float
    theory_s1: float
    theory_s2: float
    theory_s1s2: float
    theory_epsilon: float
    theory_eta: float
    theory_ozawa_lhs: float
    theory_product: float
    bound: float
    stderr_s1: float
    stderr_s2: float
    stderr_s1s2: float
    stderr_epsilon: float
    stderr_eta: float
    stderr_ozawa_lhs: float
    stderr_product: float
    detected: int
    seed: int
    n_events: int
    model: str
    gamma: float


class FilteringTripleRow(BaseModel):
    phi: float
    s1: float
    s2: float
    s3: float
    s1s2: float
    s1s3: float
    s2s3: float
    s1s2s3: float
    theory_s1: float
    theory_s2: float
    theory_s3: float
    theory_s1s2: float
    theory_s1s3: float
    theory_s2s3: float
    theory_s1s2s3: float
    pair_x_s1: float
    pair_x_s2: float
    pair_x_s1s2: float
    pair_y_s1: float
    pair_y_s2: float
    pair_y_s1s2: float
    stderr_pair: float
    seed: int
    n_events: int
    model: str
    gamma: float


class RobertsonSweepRow(BaseModel):
    az: float
    ax: float
    ay: float
    sigma_x: float
    sigma_y: float
    sigma_z: float
    lhs: float
    rhs: float
    theory_lhs: float
    theory_rhs: float
    stderr_lhs: float
    stderr_rhs: float
    seed: int
    n_events: int
    model: str
    gamma: float


class OracleTableRow(BaseModel):
    phi: float
    p_pp: float
    p_pm: float
    p_mp: float
    p_mm: float
    theory_s1: float
    theory_s2: float
    theory_s1s2: float
    theory_epsilon: float
    theory_eta: float
    theory_ozawa_lhs: float
    theory_product: float
    bound: float
    seed: int
    n_events: int
    model: str
    gamma: float


SweepRow = UncertaintySweepRow | FilteringTripleRow | RobertsonSweepRow | OracleTableRow


class LabPoint(BaseModel):
    """One externally measured (φ, Ozawa LHS, εη) point."""
    phi: float
    ozawa_lhs: float
    product: float

    model_config = ConfigDict(frozen=True)


# ============== Run Manifest ==============

class RunManifest(BaseModel):
    """Everything needed to reproduce one CLI run."""
    experiment: ExperimentKind
    seed: int = Field(..., ge=0, lt=2**64)
    n_events: int = Field(..., ge=1)
    model: AnalyzerModel = AnalyzerModel.PROBABILISTIC
    gamma: float = Field(..., ge=0.0, lt=1.0)
    warmup: int = Field(..., ge=0)
    phi_start: float = 0.0
    phi_end: float = TWO_PI
    phi_step: float = Field(..., gt=0.0)
    initial_moment: str = "x"
    az_step: float = Field(..., gt=0.0, le=2.0)
    output_path: str
    output_format: OutputFormat = OutputFormat.CSV
    emit_plots: bool = False
    lab_data: Optional[str] = None

    model_config = ConfigDict(frozen=True, extra="forbid")

    @field_validator("phi_start", "phi_end")
    @classmethod
    def validate_finite(cls, v: float) -> float:
        if not math.isfinite(v):
            raise ValueError("Angles must be finite")
        return v

    @field_validator("initial_moment")
    @classmethod
    def normalize_moment(cls, v: str) -> str:
        vec = parse_moment(v)
        key = v.strip().lower()
        if key in {"x", "y", "z"}:
            return key
        return ",".join(repr(c) for c in vec)

    @model_validator(mode="after")
    def check_consistency(self) -> "RunManifest":
        if self.phi_end <= self.phi_start:
            raise ValueError("phi_end must exceed phi_start")
        norm = vector_norm(self.moment_vector)
        if self.experiment is ExperimentKind.ORACLE_TABLE:
            if norm > 1.0 + 1e-9:
                raise ValueError(f"initial_moment norm {norm} exceeds 1")
        elif abs(norm - 1.0) > UNIT_TOLERANCE:
            raise ValueError(f"initial_moment must be a unit vector, norm is {norm}")
        return self

    @property
    def moment_vector(self) -> Vector3:
        return parse_moment(self.initial_moment)

    def to_argv(self) -> list[str]:
        """Flag set that reconstructs this manifest."""
        # --flag=value keeps negative numbers and vectors from reading as options
        values = [
            ("--seed", str(self.seed)),
            ("--n-events", str(self.n_events)),
            ("--model", self.model.value),
            ("--gamma", repr(self.gamma)),
            ("--warmup", str(self.warmup)),
            ("--phi-start", repr(self.phi_start)),
            ("--phi-end", repr(self.phi_end)),
            ("--phi-step", repr(self.phi_step)),
            ("--initial-moment", self.initial_moment),
            ("--az-step", repr(self.az_step)),
            ("--output", self.output_path),
            ("--format", self.output_format.value),
        ]
        if self.lab_data is not None:
            values.append(("--lab-data", self.lab_data))
        argv = [self.experiment.value] + [f"{flag}={value}" for flag, value in values]
        if self.emit_plots:
            argv.append("--emit-plots")
        return argv


# ============== Audit Schemas ==============

class AuditEntry(BaseModel):
    """One executed setting run."""
    id: Optional[str] = None
    timestamp: datetime = Field(default_factory=datetime.utcnow)
    experiment: str
    key: str
    emitted: int
    detected: int
    destroyed: int
    elapsed_ms: float
    success: bool
    error_message: Optional[str] = None

    @field_serializer("timestamp")
    def serialize_datetime(self, v: datetime) -> str:
        return v.isoformat()


# ============== Error Schemas ==============

class ErrorReport(BaseModel):
    """Standardized error response."""
    error: bool = True
    code: str
    message: str
    details: Optional[dict[str, Any]] = None
