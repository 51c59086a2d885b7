"""Run configuration and report records for rieszbound."""

from __future__ import annotations

import hashlib
import json
import math
from pathlib import Path
from typing import TYPE_CHECKING, Any, Literal

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from rieszbound.domain.energy import energy_bipyramid
from rieszbound.domain.exceptions import VerificationFailedError
from rieszbound.domain.polycore import DEFAULT_PRECISION_BITS, scalar_context
from rieszbound.domain.sdpgen import DEFAULT_M_BOUND, derive_threshold_U

if TYPE_CHECKING:
    from collections.abc import Iterable

MIN_PRECISION_BITS = 64
#: Point count of the bipyramid and square pyramid reference configurations.
REFERENCE_POINT_COUNT = 5
DEFAULT_SOLVER_CMD = 'csdp {input} {output}'
DEFAULT_SAMPLES = 10_000
#: Safety factor on the solver tolerance when comparing a bound to a reference energy.
TOLERANCE_FACTOR = 10


class Config(BaseModel):
    """Everything one pipeline run depends on."""

    model_config = ConfigDict(frozen=True, extra='forbid')

    s: int = Field(1, ge=1, description='Riesz exponent')
    n_particles: int = Field(5, ge=2, description='Number of points N')
    d: int = Field(0, ge=0, description='Truncation degree of the kernel')
    delta: int = Field(2, ge=0, description='Degree of the SOS certificates for triples and quadruples')
    precision_bits: int = Field(DEFAULT_PRECISION_BITS, description='Working precision in bits')
    u_mode: Literal['from-upper-bound', 'explicit'] = Field(
        'from-upper-bound',
        description='Derive U from an energy upper bound, or take it as given',
    )
    upper_bound: float | None = Field(None, gt=0, description='Energy upper bound B; the bipyramid energy when omitted')
    u_threshold: float | None = Field(None, gt=-1, lt=1, description='Explicit inner-product threshold U')
    m_bound: float = Field(DEFAULT_M_BOUND, gt=0, description='Bound on each half of a split free variable')
    solver_cmd: str = Field(DEFAULT_SOLVER_CMD, description='Solver command with {input} and {output} placeholders')
    solver_family: Literal['csdp', 'sdpa'] | None = Field(None, description='Output dialect; inferred from the command')
    solver_tolerance: float = Field(1e-7, gt=0)
    symmetry: bool = True
    seed: int = Field(0, ge=0)
    workdir: Path = Field(Path('rbound-runs'), description='Root of the per-instance workspaces')
    digits: int = Field(40, ge=1, description='Significant digits written to SDPA files')
    samples: int = Field(DEFAULT_SAMPLES, ge=0, description='Independent sets sampled per cardinality')
    pair_form: Literal['auto', 'w', 'u'] = 'auto'
    epsilon_shift: int = Field(0, description='Regularization offset of the inner-product rewrite, in bits')

    @field_validator('precision_bits')
    @classmethod
    def validate_precision(cls, v: int) -> int:
        """Working precision is at least 64 bits."""
        if v < MIN_PRECISION_BITS:
            msg = f'precision_bits must be at least {MIN_PRECISION_BITS}, got {v}'
            raise ValueError(msg)
        return v

    @field_validator('solver_cmd')
    @classmethod
    def validate_solver_cmd(cls, v: str) -> str:
        """The command names its input file."""
        if '{input}' not in v:
            msg = 'solver_cmd must contain the {input} placeholder'
            raise ValueError(msg)
        return v

    @model_validator(mode='after')
    def validate_threshold_mode(self) -> Config:
        """Explicit mode needs U; the upper-bound mode must not also get one."""
        if self.u_mode == 'explicit' and self.u_threshold is None:
            msg = 'u_mode explicit requires u_threshold'
            raise ValueError(msg)
        if self.u_mode == 'from-upper-bound' and self.u_threshold is not None:
            msg = 'u_threshold is only used with u_mode explicit'
            raise ValueError(msg)
        if self.n_particles != REFERENCE_POINT_COUNT and self.u_mode == 'from-upper-bound' and self.upper_bound is None:
            msg = f'upper_bound is required for n_particles={self.n_particles}; the default covers 5 points only'
            raise ValueError(msg)
        if self.pair_form == 'u' and self.s % 2:
            msg = f'pair_form u needs an even s, got s={self.s}'
            raise ValueError(msg)
        return self

    @property
    def family(self) -> Literal['csdp', 'sdpa']:
        """Solver output dialect, inferred from the executable name when not set."""
        if self.solver_family is not None:
            return self.solver_family
        executable = Path(self.solver_cmd.split()[0]).name.lower()
        return 'sdpa' if executable.startswith('sdpa') else 'csdp'

    def reference_upper_bound(self) -> Any:  # noqa: ANN401
        """B used for the threshold: the configured bound or the bipyramid energy."""
        if self.upper_bound is not None:
            return self.upper_bound
        return energy_bipyramid(self.s, self.precision_bits)

    def resolve_threshold(self) -> Any:  # noqa: ANN401
        """U at working precision.

        Raises:
            ThresholdError: If the derived U lies outside (-1, 1)

        """
        if self.u_mode == 'explicit':
            return scalar_context(self.precision_bits).convert(self.u_threshold)
        return derive_threshold_U(self.s, self.reference_upper_bound(), self.precision_bits)

    def problem_fields(self) -> dict[str, Any]:
        """Fields that determine the emitted problem."""
        return self.model_dump(
            mode='json',
            include={
                's', 'n_particles', 'd', 'delta', 'precision_bits', 'u_mode', 'upper_bound',
                'u_threshold', 'm_bound', 'symmetry', 'digits', 'pair_form', 'epsilon_shift',
            },
        )

    def config_hash(self) -> str:
        """Stable digest of the problem-defining fields."""
        canonical = json.dumps(self.problem_fields(), sort_keys=True)
        return hashlib.sha256(canonical.encode('utf-8')).hexdigest()[:16]

    def as_config_text(self) -> str:
        """The configuration as ``key = value`` lines that read back to an equal Config."""
        values = self.model_dump(mode='json')
        lines = [f'# rieszbound configuration {self.config_hash()}']
        lines += [f'{key} = {json.dumps(value)}' for key, value in values.items()]
        return '\n'.join(lines) + '\n'

    def instance_title(self) -> str:
        """Readable name of the instance, used for its workspace."""
        symmetry = 'sym' if self.symmetry else 'nosym'
        return f's{self.s} N{self.n_particles} d{self.d} delta{self.delta} {symmetry}'


CONFIG_KEYS = frozenset(Config.model_fields)


class ProblemSummary(BaseModel):
    """What generation produced."""

    model_config = ConfigDict(frozen=True)

    path: Path
    threshold: str = Field(..., description='U at 30 significant digits')
    blocks: int
    scalars: int
    rows_assembled: int
    rows_kept: int
    reused: bool = False
    seconds: float = 0.0


class SolverRun(BaseModel):
    """Raw record of one solver subprocess."""

    model_config = ConfigDict(frozen=True)

    command: list[str]
    returncode: int
    stdout: str = ''
    stderr: str = ''
    seconds: float = 0.0


class ReferenceEnergies(BaseModel):
    """Energies of explicit configurations the bound is compared against."""

    model_config = ConfigDict(frozen=True)

    bipyramid: float
    square_pyramid: float
    square_pyramid_height: float

    @property
    def best(self) -> float:
        """Smallest reference energy."""
        return min(self.bipyramid, self.square_pyramid)


class VerificationReport(BaseModel):
    """Comparison of a solved bound with configuration energies."""

    model_config = ConfigDict(frozen=True)

    bound: float
    reference: float = Field(..., description='Smallest known energy of an N-point configuration')
    references: ReferenceEnergies | None = Field(None, description='Five-point reference configurations')
    tolerance: float
    max_violation: float | None = Field(None, description='Largest sampled dual-constraint violation')

    @property
    def gap(self) -> float:
        """Reference energy minus the bound."""
        return self.reference - self.bound

    @property
    def gap_bipyramid(self) -> float | None:
        """Bipyramid energy minus the bound."""
        return None if self.references is None else self.references.bipyramid - self.bound

    @property
    def gap_square_pyramid(self) -> float | None:
        """Square-pyramid energy minus the bound."""
        return None if self.references is None else self.references.square_pyramid - self.bound

    @property
    def passed(self) -> bool:
        """Bound below the reference within tolerance, and dual constraints hold on the samples."""
        safe = self.bound <= self.reference + self.tolerance
        feasible = self.max_violation is None or self.max_violation <= self.tolerance
        return safe and feasible

    def as_lines(self) -> list[tuple[str, str]]:
        """Flat key-value view in reading order."""
        lines = [
            ('bound', f'{self.bound:.12g}'),
            ('reference_energy', f'{self.reference:.15g}'),
            ('gap', f'{self.gap:.6e}'),
        ]
        if self.references is not None:
            lines += [
                ('energy_bipyramid', f'{self.references.bipyramid:.15g}'),
                ('energy_square_pyramid', f'{self.references.square_pyramid:.15g}'),
                ('square_pyramid_height', f'{self.references.square_pyramid_height:.12g}'),
                ('gap_bipyramid', f'{self.gap_bipyramid:.6e}'),
                ('gap_square_pyramid', f'{self.gap_square_pyramid:.6e}'),
            ]
        lines += [
            ('max_dual_violation', _optional(self.max_violation)),
            ('verdict', 'PASS' if self.passed else 'FAIL'),
        ]
        return lines

    def require_passed(self) -> VerificationReport:
        """Return self when the bound is safe.

        Raises:
            VerificationFailedError: If the bound exceeds the reference energy or a sampled constraint fails

        """
        if not self.passed:
            msg = (
                f'Bound {self.bound:.12g} exceeds the reference energy {self.reference:.12g} '
                f'or violates sampled constraints (max violation {self.max_violation}) beyond tolerance {self.tolerance:.1e}'
            )
            raise VerificationFailedError(msg)
        return self


class RunReport(BaseModel):
    """Everything a pipeline run records."""

    model_config = ConfigDict(frozen=True)

    config_hash: str
    config: dict[str, Any]
    problem: ProblemSummary
    status: str
    primal_objective: float | None = None
    dual_objective: float | None = None
    iterations: int | None = None
    verification: VerificationReport
    timings: dict[str, float] = Field(default_factory=dict)
    paths: dict[str, str] = Field(default_factory=dict)

    def as_lines(self) -> list[tuple[str, str]]:
        """Flat key-value view in reading order."""
        return [
            ('config_hash', self.config_hash),
            ('status', self.status),
            ('primal_objective', _optional(self.primal_objective)),
            ('dual_objective', _optional(self.dual_objective)),
            ('iterations', _optional(self.iterations)),
            ('threshold_U', self.problem.threshold),
            *self.verification.as_lines(),
            *((f'time_{stage}', f'{seconds:.2f}') for stage, seconds in self.timings.items()),
            *((f'path_{name}', path) for name, path in self.paths.items()),
        ]

    def as_text(self) -> str:
        """Line-oriented ``key = value`` rendering."""
        return key_value_text(self.as_lines())


def key_value_text(lines: Iterable[tuple[str, str]]) -> str:
    """Render pairs as ``key = value`` lines."""
    return ''.join(f'{key} = {value}\n' for key, value in lines)


def _optional(value: float | None) -> str:
    if value is None:
        return '-'
    return f'{value:.12g}' if isinstance(value, float) else str(value)


class OracleReport(BaseModel):
    """Finite-container relaxation compared with brute force."""

    model_config = ConfigDict(frozen=True)

    n: int = Field(..., description='Container size')
    N: int = Field(..., description='Points chosen')
    t: int = Field(..., description='Relaxation level')
    s: int
    seed: int
    brute_force: float
    minimizer: tuple[int, ...]
    relaxation: float | None = Field(None, description='Solved L_t, when a solver ran')
    status: str | None = None
    cardinality_sums: dict[int, float] = Field(default_factory=dict, description='Sum of y_S over |S| = i')
    problem_path: Path | None = None

    @property
    def expected_sums(self) -> dict[int, int]:
        """C(N, i) for every cardinality present."""
        return {size: math.comb(self.N, size) for size in self.cardinality_sums}

    @property
    def gap(self) -> float | None:
        """Brute-force minimum minus the relaxation value."""
        return None if self.relaxation is None else self.brute_force - self.relaxation
