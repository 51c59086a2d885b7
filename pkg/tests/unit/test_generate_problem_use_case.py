"""Unit tests for GenerateProblemUseCase."""

from __future__ import annotations

from pathlib import Path

import pytest

from rieszbound.domain.entities import Config
from rieszbound.domain.exceptions import StageError, ThresholdError
from rieszbound.use_cases.generate_problem import GenerateProblemUseCase, instance_directory


class FakeFileSystem:
    """In-memory filesystem recording every write."""

    def __init__(self) -> None:
        self.files: dict[str, str] = {}
        self.directories: set[str] = set()
        self.writes: list[str] = []

    async def read_file(self, filepath: Path) -> str:
        """Return stored content."""
        if str(filepath) not in self.files:
            raise FileNotFoundError(str(filepath))
        return self.files[str(filepath)]

    async def write_file(self, filepath: Path, content: str) -> None:
        """Store content."""
        self.files[str(filepath)] = content
        self.writes.append(filepath.name)

    async def file_exists(self, filepath: Path) -> bool:
        """Check stored files."""
        return str(filepath) in self.files

    async def create_directory(self, directory: Path) -> None:
        """Remember the directory."""
        self.directories.add(str(directory))

    async def list_files(self, directory: Path, pattern: str = '*') -> list[Path]:
        """List stored files under the directory."""
        return sorted(Path(name) for name in self.files if Path(name).parent == directory)


class FakeWorkspace:
    """Workspace naming by title and digest prefix."""

    def instance_id(self, title: str, digest: str) -> str:
        """Join the slug and the first digest characters."""
        return f'{title.replace(" ", "-")}-{digest[:6]}'

    def digest_prefix(self, instance_id: str) -> str | None:
        """Read the digest prefix back."""
        return instance_id.rsplit('-', 1)[-1]


@pytest.mark.asyncio
async def test_writes_problem_and_config() -> None:
    """The problem file and the configuration land in the instance directory."""
    fs = FakeFileSystem()
    config = Config(workdir=Path('/runs'))

    generated = await GenerateProblemUseCase(fs, FakeWorkspace()).execute(config)

    directory = Path('/runs') / f's1-N5-d0-delta2-sym-{config.config_hash()[:6]}'
    assert generated.directory == directory
    assert instance_directory(config, FakeWorkspace()) == directory
    assert generated.summary.path == directory / 'problem.dat-s'
    assert str(directory) in fs.directories
    assert fs.files[str(directory / 'config.txt')] == config.as_config_text()
    assert fs.files[str(directory / 'problem.dat-s')].startswith('"')


@pytest.mark.asyncio
async def test_summary() -> None:
    """The summary reports the threshold and the pruning."""
    fs = FakeFileSystem()

    generated = await GenerateProblemUseCase(fs, FakeWorkspace()).execute(Config(workdir=Path('/runs')))
    summary = generated.summary

    assert summary.threshold.startswith('0.98807')
    assert 0 < summary.rows_kept <= summary.rows_assembled
    assert summary.rows_kept == generated.problem.constraint_count
    assert summary.blocks == len(generated.problem.block_layout())
    assert summary.reused is False


@pytest.mark.asyncio
async def test_rerun_reuses_files() -> None:
    """A second run with the same configuration rewrites nothing."""
    fs = FakeFileSystem()
    use_case = GenerateProblemUseCase(fs, FakeWorkspace())
    config = Config(workdir=Path('/runs'))

    await use_case.execute(config)
    writes = len(fs.writes)
    generated = await use_case.execute(config)

    assert generated.summary.reused is True
    assert len(fs.writes) == writes


@pytest.mark.asyncio
async def test_stage_timings() -> None:
    """Each stage records its time."""
    timings: dict[str, float] = {}

    await GenerateProblemUseCase(FakeFileSystem(), FakeWorkspace()).execute(Config(workdir=Path('/runs')), timings)

    assert list(timings) == ['generate', 'prune', 'emit']


@pytest.mark.asyncio
async def test_threshold_failure_is_labelled() -> None:
    """An upper bound too small for a threshold fails in the generate stage."""
    config = Config(workdir=Path('/runs'), n_particles=6, upper_bound=0.1)

    with pytest.raises(StageError) as exc_info:
        await GenerateProblemUseCase(FakeFileSystem(), FakeWorkspace()).execute(config)

    assert exc_info.value.stage == 'generate'
    assert isinstance(exc_info.value.cause, ThresholdError)
