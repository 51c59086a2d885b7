"""Unit tests for FiniteOracleUseCase."""

from __future__ import annotations

from pathlib import Path

import pytest

from rieszbound.domain.entities import Config, SolverRun
from rieszbound.use_cases.finite_oracle import FiniteOracleUseCase


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


class FakeWorkspace:
    """Fixed instance naming."""

    def instance_id(self, title: str, digest: str) -> str:
        """Slug plus digest."""
        return f'{title.replace(" ", "-")}-{digest}'

    def digest_prefix(self, instance_id: str) -> str | None:
        """Read the digest back."""
        return instance_id.rsplit('-', 1)[-1]


class FakeSolver:
    """Solver reporting a fixed maximization objective."""

    async def solve(self, input_path: Path, output_path: Path) -> SolverRun:
        """Return a CSDP report with primal objective -2.5."""
        stdout = 'Success: SDP solved\nPrimal objective value: -2.5000000000e+00\nDual objective value: -2.5000000000e+00\n'
        return SolverRun(command=['csdp', str(input_path)], returncode=0, stdout=stdout)


@pytest.mark.asyncio
async def test_without_solver() -> None:
    """Only the brute-force minimum and the problem file are produced."""
    fs = FakeFileSystem()

    report = await FiniteOracleUseCase(fs, FakeWorkspace()).execute(Config(workdir=Path('/runs')), 6, 3, 1)

    assert report.relaxation is None
    assert report.gap is None
    assert report.brute_force > 0
    assert len(report.minimizer) == 3
    assert str(report.problem_path) in fs.files
    assert report.problem_path.parent.parent == Path('/runs')


@pytest.mark.asyncio
async def test_seed_is_reproducible() -> None:
    """The same seed draws the same container."""
    config = Config(workdir=Path('/runs'), seed=7)
    first = await FiniteOracleUseCase(FakeFileSystem(), FakeWorkspace()).execute(config, 5, 2, 1)
    second = await FiniteOracleUseCase(FakeFileSystem(), FakeWorkspace()).execute(config, 5, 2, 1)

    assert first == second


@pytest.mark.asyncio
async def test_with_solver() -> None:
    """The relaxation is the negated maximization objective."""
    report = await FiniteOracleUseCase(FakeFileSystem(), FakeWorkspace(), FakeSolver()).execute(
        Config(workdir=Path('/runs')),
        6,
        3,
        1,
    )

    assert report.relaxation == 2.5
    assert report.status == 'OPTIMAL'
    assert report.cardinality_sums == {}
    assert report.gap == pytest.approx(report.brute_force - 2.5)
