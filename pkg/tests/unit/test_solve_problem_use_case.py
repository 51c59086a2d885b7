"""Unit tests for SolveProblemUseCase."""

from __future__ import annotations

from pathlib import Path

import pytest
import yaml

from rieszbound.domain.entities import SolverRun
from rieszbound.domain.exceptions import SolverNonconvergenceError, SolverNotFoundError, SolverOutputParseError
from rieszbound.use_cases.solve_problem import SolveProblemUseCase

CSDP_STDOUT = """\
Iter: 17 Ap: 1.00e+00 Pobj:  6.4740000e+00 Ad: 1.00e+00 Dobj:  6.4740001e+00
Success: SDP solved
Primal objective value: 6.4740000000e+00
Dual objective value: 6.4740001000e+00
"""

SDPA_OUT = """\
   iteration = 23
   phase.value  = pdOPT
   objValPrimal = 4.2499999000000000e+00
   objValDual   = 4.2500000000000000e+00
yMat =
{
{ {+1.0e+00,+5.0e-01 },{+5.0e-01,+2.0e+00 } }
{+3.0e+00 }
}
"""

PROBLEM = Path('/runs/inst/problem.dat-s')


class FakeFileSystem:
    """In-memory filesystem."""

    def __init__(self) -> None:
        self.files: dict[str, str] = {}

    async def read_file(self, filepath: Path) -> str:
        """Return stored content."""
        if str(filepath) not in self.files:
            raise FileNotFoundError(str(filepath))
        return self.files[str(filepath)]

    async def write_file(self, filepath: Path, content: str) -> None:
        """Store content."""
        self.files[str(filepath)] = content

    async def file_exists(self, filepath: Path) -> bool:
        """Check stored files."""
        return str(filepath) in self.files

    async def create_directory(self, directory: Path) -> None:
        """Directories are implicit."""

    async def list_files(self, directory: Path, pattern: str = '*') -> list[Path]:
        """List stored files under the directory."""
        return sorted(Path(name) for name in self.files if Path(name).parent == directory)


class FakeSolver:
    """Solver returning a canned run and optionally writing an output file."""

    def __init__(self, fs: FakeFileSystem, stdout: str = '', returncode: int = 0, output: str | None = None) -> None:
        self.fs = fs
        self.stdout = stdout
        self.returncode = returncode
        self.output = output
        self.calls: list[tuple[Path, Path]] = []

    async def solve(self, input_path: Path, output_path: Path) -> SolverRun:
        """Record the call and return the canned run."""
        self.calls.append((input_path, output_path))
        if self.output is not None:
            await self.fs.write_file(output_path, self.output)
        return SolverRun(command=['fake', str(input_path)], returncode=self.returncode, stdout=self.stdout, seconds=0.5)


class MissingSolver:
    """Solver that is not installed."""

    async def solve(self, input_path: Path, output_path: Path) -> SolverRun:
        """Always fail."""
        msg = 'Solver executable not found on PATH: fake'
        raise SolverNotFoundError(msg)


@pytest.mark.asyncio
async def test_csdp_bound_and_files() -> None:
    """CSDP's primal objective is the bound; log and parsed result are written."""
    fs = FakeFileSystem()
    solver = FakeSolver(fs, CSDP_STDOUT)

    outcome = await SolveProblemUseCase(fs, solver).execute(PROBLEM, 'csdp')

    assert outcome.bound == 6.474
    assert solver.calls == [(PROBLEM, PROBLEM.parent / 'solution.txt')]
    log = fs.files['/runs/inst/solver.log']
    assert log.startswith('$ fake /runs/inst/problem.dat-s\n# exit code 0')
    assert 'Success: SDP solved' in log
    stored = yaml.safe_load(fs.files['/runs/inst/result.yaml'])
    assert stored['status'] == 'OPTIMAL'
    assert stored['primal_objective'] == 6.474


@pytest.mark.asyncio
async def test_csdp_solution_is_read() -> None:
    """The primal matrix of the solution file becomes block values."""
    fs = FakeFileSystem()
    solver = FakeSolver(fs, CSDP_STDOUT, output='0.5\n1 1 1 1 7.0\n2 1 1 2 0.25\n')

    outcome = await SolveProblemUseCase(fs, solver).execute(PROBLEM, 'csdp')

    assert outcome.blocks == {1: {(1, 2): 0.25}}


@pytest.mark.asyncio
async def test_csdp_without_solution_file() -> None:
    """A missing solution file leaves the blocks empty."""
    fs = FakeFileSystem()

    outcome = await SolveProblemUseCase(fs, FakeSolver(fs, CSDP_STDOUT)).execute(PROBLEM, 'csdp')

    assert outcome.blocks is None


@pytest.mark.asyncio
async def test_unaccepted_status() -> None:
    """Hitting the iteration limit is a nonconvergence, after the log is written."""
    fs = FakeFileSystem()

    with pytest.raises(SolverNonconvergenceError) as exc_info:
        await SolveProblemUseCase(fs, FakeSolver(fs, CSDP_STDOUT, returncode=4)).execute(PROBLEM, 'csdp')

    assert exc_info.value.status == 'MAX_ITERATIONS'
    assert '/runs/inst/solver.log' in fs.files
    assert '/runs/inst/result.yaml' in fs.files


@pytest.mark.asyncio
async def test_missing_solver() -> None:
    """A missing executable propagates unchanged."""
    with pytest.raises(SolverNotFoundError):
        await SolveProblemUseCase(FakeFileSystem(), MissingSolver()).execute(PROBLEM, 'csdp')


@pytest.mark.asyncio
async def test_sdpa_result_file() -> None:
    """SDPA's dual objective is the bound and yMat gives the blocks."""
    fs = FakeFileSystem()
    solver = FakeSolver(fs, 'SDPA done\n', output=SDPA_OUT)

    outcome = await SolveProblemUseCase(fs, solver).execute(PROBLEM, 'sdpa', [2, -1])

    assert solver.calls == [(PROBLEM, PROBLEM.parent / 'result.out')]
    assert outcome.bound == 4.25
    assert outcome.blocks == {1: {(1, 1): 1.0, (1, 2): 0.5, (2, 2): 2.0}, 2: {(1, 1): 3.0}}


@pytest.mark.asyncio
async def test_sdpa_without_result_file() -> None:
    """SDPA reports only through its result file."""
    fs = FakeFileSystem()

    with pytest.raises(SolverOutputParseError, match='no result file'):
        await SolveProblemUseCase(fs, FakeSolver(fs, 'crash\n')).execute(PROBLEM, 'sdpa', [2, -1])
