"""Tests for the key-value configuration file adapter."""

from __future__ import annotations

from typing import TYPE_CHECKING

import pytest

from rieszbound.adapters.config_file import KeyValueConfigAdapter, parse_config_text
from tests.contract.test_config_source_port import TestConfigSourcePortContract

if TYPE_CHECKING:
    from pathlib import Path


@pytest.fixture
def config_source() -> KeyValueConfigAdapter:
    """Provide KeyValueConfigAdapter instance for contract tests."""
    return KeyValueConfigAdapter()


class TestKeyValueConfigAdapter(TestConfigSourcePortContract):
    """Test KeyValueConfigAdapter against ConfigSourcePort contract."""

    __test__ = True

    @pytest.mark.asyncio
    async def test_written_config_reads_back(self, config_source: KeyValueConfigAdapter, tmp_path: Path) -> None:
        """as_config_text output loads to an equal Config."""
        from rieszbound.domain.entities import Config

        config = Config(s=2, delta=4, symmetry=False, workdir=tmp_path / 'runs')
        path = tmp_path / 'config.txt'
        path.write_text(config.as_config_text())

        assert Config(**await config_source.load(path)) == config


class TestParseConfigText:
    """Test suite for the line parser."""

    def test_dashes_become_underscores(self) -> None:
        """Command-line style keys are accepted."""
        assert parse_config_text('n-particles = 6\nupper-bound = 9.985') == {'n_particles': 6, 'upper_bound': 9.985}

    def test_empty_value_is_none(self) -> None:
        """An empty value clears an optional field."""
        assert parse_config_text('upper_bound =') == {'upper_bound': None}

    @pytest.mark.parametrize(
        ('text', 'fragment'),
        [
            ('s 1', 'expected'),
            ('s = 1\ns = 2', 'twice'),
            ('s = [1, 2]', 'scalar'),
            ('s = {a: 1}', 'scalar'),
            ('s = "open', 'cannot read'),
        ],
    )
    def test_malformed_lines(self, text: str, fragment: str) -> None:
        """Each malformed line names the problem and its line number."""
        from rieszbound.domain.exceptions import ConfigError

        with pytest.raises(ConfigError, match=fragment) as exc_info:
            parse_config_text(text)

        assert 'Line ' in str(exc_info.value)
