"""Unit tests for LoadConfigUseCase."""

from __future__ import annotations

from pathlib import Path
from typing import Any

import pytest

from rieszbound.domain.exceptions import ConfigError
from rieszbound.use_cases.load_config import LoadConfigUseCase


class FakeConfigSource:
    """Fake configuration source serving fixed values per path."""

    def __init__(self, files: dict[str, dict[str, Any]] | None = None) -> None:
        self.files = files or {}

    async def load(self, path: Path) -> dict[str, Any]:
        """Return the stored values or raise FileNotFoundError."""
        if str(path) not in self.files:
            raise FileNotFoundError(str(path))
        return dict(self.files[str(path)])


@pytest.mark.asyncio
async def test_defaults_without_file() -> None:
    """No file and no overrides gives the five-point Coulomb defaults."""
    config = await LoadConfigUseCase(FakeConfigSource()).execute(None, {})

    assert (config.s, config.n_particles, config.d, config.delta) == (1, 5, 0, 2)
    assert config.symmetry is True
    assert config.family == 'csdp'


@pytest.mark.asyncio
async def test_overrides_win_over_file() -> None:
    """Command-line values replace file values; None means not given."""
    source = FakeConfigSource({'/run.conf': {'s': 2, 'delta': 4}})

    config = await LoadConfigUseCase(source).execute(Path('/run.conf'), {'delta': 6, 's': None})

    assert config.s == 2
    assert config.delta == 6


@pytest.mark.asyncio
async def test_explicit_threshold_switches_mode() -> None:
    """Giving U selects the explicit threshold mode."""
    config = await LoadConfigUseCase(FakeConfigSource()).execute(None, {'u_threshold': 0.9})

    assert config.u_mode == 'explicit'
    assert float(config.resolve_threshold()) == pytest.approx(0.9)


@pytest.mark.asyncio
async def test_missing_file() -> None:
    """A missing configuration file is a configuration error."""
    with pytest.raises(ConfigError, match='not found'):
        await LoadConfigUseCase(FakeConfigSource()).execute(Path('/missing.conf'), {})


@pytest.mark.asyncio
@pytest.mark.parametrize(
    ('overrides', 'fragment'),
    [
        ({'s': 0}, 's'),
        ({'precision_bits': 32}, 'precision_bits'),
        ({'n_particles': 6}, 'upper_bound'),
        ({'s': 1, 'pair_form': 'u'}, 'even'),
        ({'solver_cmd': 'csdp'}, 'input'),
    ],
)
async def test_invalid_values(overrides: dict[str, Any], fragment: str) -> None:
    """Validation failures name the offending setting."""
    with pytest.raises(ConfigError, match=fragment):
        await LoadConfigUseCase(FakeConfigSource()).execute(None, overrides)


@pytest.mark.asyncio
async def test_sdpa_family_inferred() -> None:
    """An sdpa executable selects the SDPA output dialect."""
    config = await LoadConfigUseCase(FakeConfigSource()).execute(None, {'solver_cmd': '/opt/bin/sdpa_gmp -ds {input} -o {output}'})

    assert config.family == 'sdpa'
