"""SDPA-sparse reading and writing, and parsing of CSDP and SDPA solver output.

A problem is written in the SDPA dual form

    maximize F_0 . Y  subject to  F_k . Y = c_k (k = 1..m),  Y PSD,

so the program's objective becomes F_0 and every constraint row becomes one
F_k with right side c_k. Only upper-triangle entries are written; an
off-diagonal coefficient of a program row is halved because F_k . Y counts it
twice.
"""

from __future__ import annotations

import logging
import re
from typing import TYPE_CHECKING, Any, Literal

from pydantic import BaseModel, ConfigDict, Field

from rieszbound.domain.exceptions import SdpaFormatError, SolverNonconvergenceError, SolverOutputParseError
from rieszbound.domain.polycore import DEFAULT_PRECISION_BITS, scalar_context
from rieszbound.domain.sosmodel import VarKey

if TYPE_CHECKING:
    from collections.abc import Iterator, Mapping

    from rieszbound.domain.polycore import Scalar
    from rieszbound.domain.sdpgen import SdpProblem

logger = logging.getLogger(__name__)

DEFAULT_DIGITS = 40
COMMENT_PREFIXES = ('"', '*')

SolverFamily = Literal['csdp', 'sdpa']
Status = Literal['OPTIMAL', 'NEAR_OPTIMAL', 'INFEASIBLE', 'UNBOUNDED', 'MAX_ITERATIONS', 'NUMERICAL', 'UNKNOWN']

#: Statuses whose objective is trusted as a bound.
ACCEPTED_STATUSES = frozenset({'OPTIMAL', 'NEAR_OPTIMAL'})

CSDP_STATUS: dict[int, Status] = {
    0: 'OPTIMAL',
    1: 'INFEASIBLE',
    2: 'UNBOUNDED',
    3: 'NEAR_OPTIMAL',
    4: 'MAX_ITERATIONS',
    5: 'NUMERICAL',
    6: 'NUMERICAL',
    7: 'NUMERICAL',
    8: 'NUMERICAL',
    9: 'NUMERICAL',
}

SDPA_PHASE: dict[str, Status] = {
    'pdOPT': 'OPTIMAL',
    'pdFEAS': 'NEAR_OPTIMAL',
    'pFEAS': 'NUMERICAL',
    'dFEAS': 'NUMERICAL',
    'noINFO': 'UNKNOWN',
    'pINF_dFEAS': 'UNBOUNDED',
    'pFEAS_dINF': 'INFEASIBLE',
    'pdINF': 'INFEASIBLE',
    'pUNBD': 'INFEASIBLE',
    'dUNBD': 'UNBOUNDED',
}

_NUMBER = r'[-+]?(?:\d+\.?\d*|\.\d+)(?:[eEdD][-+]?\d+)?'


class SdpaEntry(BaseModel):
    """One quintuple ``matno block i j value`` with one-based indices and i <= j."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    matno: int = Field(..., ge=0)
    block: int = Field(..., ge=1)
    i: int = Field(..., ge=1)
    j: int = Field(..., ge=1)
    value: Any


class SdpaData(BaseModel):
    """Contents of an SDPA-sparse file."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    block_struct: list[int] = Field(..., description='Block sizes; negative for diagonal blocks')
    c: list[Any] = Field(default_factory=list, description='Right sides c_1..c_m')
    entries: list[SdpaEntry] = Field(default_factory=list)

    @property
    def m(self) -> int:
        """Number of constraints."""
        return len(self.c)

    def sorted_entries(self) -> list[SdpaEntry]:
        """Entries in (matno, block, i, j) order."""
        return sorted(self.entries, key=lambda e: (e.matno, e.block, e.i, e.j))


def format_scalar(value: Scalar, digits: int = DEFAULT_DIGITS) -> str:
    """Scientific notation with exactly ``digits`` significant digits and a signed two-digit exponent.

    Examples: 1 -> ``1.000e+00`` at 4 digits, -0.25 -> ``-2.500e-01``.
    """
    ctx = value.context if hasattr(value, 'context') else scalar_context(DEFAULT_PRECISION_BITS)
    x = ctx.convert(value)
    if not x:
        return f'{"0." + "0" * (digits - 1)}e+00'
    sign = '-' if x < 0 else ''
    magnitude = abs(x)
    exponent = int(ctx.floor(ctx.log10(magnitude)))
    for _ in range(3):
        scaled = int(ctx.nint(magnitude * ctx.power(10, digits - 1 - exponent)))
        if scaled >= 10**digits:
            exponent += 1
        elif scaled < 10 ** (digits - 1):
            exponent -= 1
        else:
            break
    text = str(scaled)
    mantissa = text[0] + ('.' + text[1:] if digits > 1 else '')
    return f'{sign}{mantissa}e{exponent:+03d}'


def to_sdpa(problem: SdpProblem) -> SdpaData:
    """Lay a program out as SDPA data.

    Raises:
        SdpaFormatError: If a variable is not part of the layout

    """
    ctx = scalar_context(problem.precision_bits)
    block_struct = problem.block_struct

    def entries_of(matno: int, coefficients: Mapping[VarKey, Scalar]) -> Iterator[SdpaEntry]:
        for key, value in coefficients.items():
            try:
                block, i, j = problem.locate(key)
            except KeyError:
                msg = f'Variable {key} is not in any block'
                raise SdpaFormatError(msg) from None
            yield SdpaEntry(matno=matno, block=block, i=i, j=j, value=ctx.convert(value) / 2 if i != j else ctx.convert(value))

    entries = list(entries_of(0, problem.objective))
    for index, row in enumerate(problem.rows, start=1):
        entries.extend(entries_of(index, row.coefficients))
    return SdpaData(block_struct=block_struct, c=[ctx.convert(row.rhs) for row in problem.rows], entries=entries)


def format_sdpa(data: SdpaData, digits: int = DEFAULT_DIGITS, comment: str | None = None) -> str:
    """Render SDPA-sparse text with a deterministic entry order."""
    lines = [f'"{comment}"'] if comment else []
    lines.append(str(data.m))
    lines.append(str(len(data.block_struct)))
    if data.block_struct:
        lines.append(' '.join(str(size) for size in data.block_struct))
    if data.c:
        lines.append(' '.join(format_scalar(value, digits) for value in data.c))
    lines.extend(
        f'{e.matno} {e.block} {e.i} {e.j} {format_scalar(e.value, digits)}'
        for e in data.sorted_entries()
        if e.value
    )
    return '\n'.join(lines) + '\n'


def emit_sdpa_sparse(problem: SdpProblem, digits: int = DEFAULT_DIGITS) -> str:
    """SDPA-sparse text of a program."""
    data = to_sdpa(problem)
    text = format_sdpa(data, digits, comment=_describe(problem))
    logger.info('Emitted %d constraints, %d blocks, %d entries', data.m, len(data.block_struct), len(data.entries))
    return text


def _describe(problem: SdpProblem) -> str | None:
    if not problem.metadata:
        return None
    return ' '.join(f'{key}={value}' for key, value in problem.metadata.items())


def _split_numbers(line: str) -> list[str]:
    return [token for token in re.split(r'[\s,{}()]+', line) if token]


def parse_sdpa(text: str, precision_bits: int = DEFAULT_PRECISION_BITS) -> SdpaData:
    """Read SDPA-sparse text. Leading comment lines start with a double quote or an asterisk.

    Raises:
        SdpaFormatError: If the header is incomplete or an entry is malformed

    """
    ctx = scalar_context(precision_bits)
    lines = [line for line in text.splitlines() if line.strip()]
    while lines and lines[0].lstrip().startswith(COMMENT_PREFIXES):
        lines.pop(0)
    if len(lines) < 2:  # noqa: PLR2004
        msg = f'SDPA header needs the constraint and block counts, got {len(lines)} lines'
        raise SdpaFormatError(msg)
    try:
        m = int(_split_numbers(lines[0])[0])
        nblocks = int(_split_numbers(lines[1])[0])
        cursor = 2
        block_struct = [int(token) for token in _split_numbers(lines[cursor])] if nblocks else []
        cursor += 1 if nblocks else 0
        c_tokens = _split_numbers(lines[cursor]) if m else []
        cursor += 1 if m else 0
    except (IndexError, ValueError) as e:
        msg = f'Malformed SDPA header: {e}'
        raise SdpaFormatError(msg) from e
    if len(block_struct) != nblocks:
        msg = f'Declared {nblocks} blocks but listed {len(block_struct)} sizes'
        raise SdpaFormatError(msg)
    if len(c_tokens) != m:
        msg = f'Declared {m} constraints but the objective line has {len(c_tokens)} values'
        raise SdpaFormatError(msg)
    c = [ctx.mpf(token.replace('D', 'e').replace('d', 'e')) for token in c_tokens]
    entries = []
    for line in lines[cursor:]:
        tokens = _split_numbers(line)
        try:
            matno, block, i, j = (int(token) for token in tokens[:4])
            value = ctx.mpf(tokens[4].replace('D', 'e').replace('d', 'e'))
        except (IndexError, ValueError) as e:
            msg = f'Malformed SDPA entry line {line!r}'
            raise SdpaFormatError(msg) from e
        if not 0 <= matno <= m or not 1 <= block <= nblocks:
            msg = f'Entry {line!r} cites a matrix or block that was not declared'
            raise SdpaFormatError(msg)
        size = abs(block_struct[block - 1])
        if not (1 <= i <= size and 1 <= j <= size) or (block_struct[block - 1] < 0 and i != j):
            msg = f'Entry {line!r} lies outside block {block} of size {block_struct[block - 1]}'
            raise SdpaFormatError(msg)
        i, j = min(i, j), max(i, j)
        entries.append(SdpaEntry(matno=matno, block=block, i=i, j=j, value=value))
    return SdpaData(block_struct=block_struct, c=c, entries=entries)


class SolverResult(BaseModel):
    """Normalized outcome of one external solver run."""

    model_config = ConfigDict(frozen=True)

    family: SolverFamily
    status: Status
    primal_objective: float | None = None
    dual_objective: float | None = None
    iterations: int | None = None
    raw_status: str = ''

    @property
    def bound(self) -> float:
        """Objective of the maximization program, the side that is a lower bound when feasible.

        CSDP's primal is the maximization; SDPA reports it as its dual.

        Raises:
            SolverOutputParseError: If the relevant objective was not reported

        """
        value = self.primal_objective if self.family == 'csdp' else self.dual_objective
        if value is None:
            msg = f'{self.family} output lacks the objective of the maximization'
            raise SolverOutputParseError(msg)
        return value

    @property
    def gap(self) -> float | None:
        """Absolute difference of the two objectives, when both are known."""
        if self.primal_objective is None or self.dual_objective is None:
            return None
        return abs(self.primal_objective - self.dual_objective)

    def require_converged(self) -> SolverResult:
        """Return self when the status is accepted.

        Raises:
            SolverNonconvergenceError: Otherwise

        """
        if self.status not in ACCEPTED_STATUSES:
            raise SolverNonconvergenceError(self.status, self.raw_status)
        return self


def _labeled_float(pattern: str, text: str) -> float | None:
    match = re.search(pattern + r'\s*[:=]\s*(' + _NUMBER + ')', text)
    return float(match.group(1).replace('D', 'e').replace('d', 'e')) if match else None


def parse_csdp_output(stdout: str, returncode: int) -> SolverResult:
    """Read CSDP's console report and exit code.

    Raises:
        SolverOutputParseError: If neither objective line is present

    """
    primal = _labeled_float(r'Primal objective value', stdout)
    dual = _labeled_float(r'Dual objective value', stdout)
    if primal is None and dual is None:
        msg = 'CSDP output has no objective value lines'
        raise SolverOutputParseError(msg)
    iterations = re.findall(r'^Iter:\s*(\d+)', stdout, flags=re.MULTILINE)
    status = CSDP_STATUS.get(returncode, 'UNKNOWN')
    summary = next((line.strip() for line in stdout.splitlines() if line.startswith(('Success', 'Partial', 'Failure', 'Stuck'))), '')
    return SolverResult(
        family='csdp',
        status=status,
        primal_objective=primal,
        dual_objective=dual,
        iterations=int(iterations[-1]) if iterations else None,
        raw_status=summary or f'exit code {returncode}',
    )


def parse_sdpa_output(text: str) -> SolverResult:
    """Read an SDPA result file (``objValPrimal``, ``objValDual``, ``phase.value``).

    Raises:
        SolverOutputParseError: If the phase or both objective lines are missing

    """
    primal = _labeled_float(r'objValPrimal', text)
    dual = _labeled_float(r'objValDual', text)
    phase = re.search(r'phase\.value\s*=\s*(\w+)', text)
    if phase is None or (primal is None and dual is None):
        msg = 'SDPA output lacks phase.value or objective values'
        raise SolverOutputParseError(msg)
    iterations = re.search(r'^\s*iteration\s*=\s*(\d+)', text, flags=re.MULTILINE)
    return SolverResult(
        family='sdpa',
        status=SDPA_PHASE.get(phase.group(1), 'UNKNOWN'),
        primal_objective=primal,
        dual_objective=dual,
        iterations=int(iterations.group(1)) if iterations else None,
        raw_status=phase.group(1),
    )


BlockValues = dict[int, dict[tuple[int, int], float]]


def parse_csdp_solution(text: str) -> BlockValues:
    """Primal matrix X (matrix number 2) of a CSDP solution file, by one-based block and upper-triangle entry.

    Raises:
        SolverOutputParseError: If a line cannot be read

    """
    lines = [line for line in text.splitlines() if line.strip()]
    blocks: BlockValues = {}
    for line in lines[1:]:
        tokens = line.split()
        try:
            matno, block, i, j = (int(token) for token in tokens[:4])
            value = float(tokens[4].replace('D', 'e'))
        except (IndexError, ValueError) as e:
            msg = f'Malformed CSDP solution line {line!r}'
            raise SolverOutputParseError(msg) from e
        if matno == 2:  # noqa: PLR2004
            blocks.setdefault(block, {})[min(i, j), max(i, j)] = value
    return blocks


def _first_group(text: str) -> list[Any]:
    """The first balanced ``{...}`` group of ``text`` as nested lists of floats."""
    stack: list[list[Any]] = []
    for token in re.findall(r'\{|\}|' + _NUMBER, text):
        if token == '{':
            stack.append([])
        elif token == '}':
            finished = stack.pop()
            if not stack:
                return finished
            stack[-1].append(finished)
        elif stack:
            stack[-1].append(float(token))
    msg = 'Unbalanced braces in solver output'
    raise SolverOutputParseError(msg)


def _depth(value: object) -> int:
    return 1 + max((_depth(item) for item in value), default=0) if isinstance(value, list) else 0


def parse_sdpa_solution(text: str, block_struct: list[int]) -> BlockValues:
    """The ``yMat`` section of an SDPA result file, laid out like ``parse_csdp_solution``.

    A lone block may be printed without the enclosing braces.

    Raises:
        SolverOutputParseError: If the section is missing or does not match the block structure

    """
    start = text.find('yMat')
    if start < 0 or '{' not in text[start:]:
        msg = 'SDPA output has no yMat section'
        raise SolverOutputParseError(msg)
    matrices = _first_group(text[text.index('{', start) :])
    if len(block_struct) == 1 and _depth(matrices) == (2 if block_struct[0] > 0 else 1):
        matrices = [matrices]
    if len(matrices) != len(block_struct):
        msg = f'yMat has {len(matrices)} blocks, expected {len(block_struct)}'
        raise SolverOutputParseError(msg)
    blocks: BlockValues = {}
    for index, (size, matrix) in enumerate(zip(block_struct, matrices, strict=True), start=1):
        values: dict[tuple[int, int], float] = {}
        if size < 0:
            for k, value in enumerate(matrix, start=1):
                values[k, k] = value
        else:
            for r, row in enumerate(matrix, start=1):
                for col, value in enumerate(row, start=1):
                    if col >= r:
                        values[r, col] = value
        blocks[index] = values
    return blocks


def recover_assignment(problem: SdpProblem, blocks: BlockValues) -> dict[VarKey, float]:
    """Map solved block entries back to program variables (absent entries are zero)."""
    layout = problem.block_layout()
    assignment: dict[VarKey, float] = {}
    for index, block in enumerate(layout, start=1):
        values = blocks.get(index, {})
        if block.kind == 'diagonal':
            for k, name in enumerate(problem.scalars, start=1):
                assignment[VarKey(name)] = values.get((k, k), 0.0)
        else:
            for (i, j), value in values.items():
                assignment[VarKey(block.name, i - 1, j - 1)] = value
    return assignment
