"""Key-value configuration file adapter.

One ``key = value`` per line; ``#`` starts a comment and blank lines are
ignored. Values are read as YAML scalars so that ``6``, ``1e-7`` and
``false`` arrive typed. Keys may use dashes or underscores.
"""

from __future__ import annotations

import logging
from typing import TYPE_CHECKING, Any

import anyio
import yaml

from rieszbound.domain.entities import CONFIG_KEYS
from rieszbound.domain.exceptions import ConfigError

if TYPE_CHECKING:
    from pathlib import Path

logger = logging.getLogger(__name__)


def parse_config_text(text: str) -> dict[str, Any]:
    """Parse key-value configuration text.

    Raises:
        ConfigError: If a line has no ``=``, a key repeats or is unknown, or a value is not a scalar

    """
    values: dict[str, Any] = {}
    for number, raw in enumerate(text.splitlines(), start=1):
        line = raw.split('#', 1)[0].strip()
        if not line:
            continue
        key, separator, value = line.partition('=')
        if not separator:
            msg = f'Line {number}: expected "key = value", got {raw.strip()!r}'
            raise ConfigError(msg)
        key = key.strip().replace('-', '_')
        if key not in CONFIG_KEYS:
            msg = f'Line {number}: unknown configuration key {key!r}'
            raise ConfigError(msg)
        if key in values:
            msg = f'Line {number}: key {key!r} given twice'
            raise ConfigError(msg)
        try:
            parsed = yaml.safe_load(value.strip()) if value.strip() else None
        except yaml.YAMLError as e:
            msg = f'Line {number}: cannot read value {value.strip()!r}'
            raise ConfigError(msg) from e
        if isinstance(parsed, (dict, list)):
            msg = f'Line {number}: value of {key!r} must be a scalar'
            raise ConfigError(msg)
        values[key] = parsed
    return values


class KeyValueConfigAdapter:
    """Concrete configuration source reading ``key = value`` files with anyio."""

    async def load(self, path: Path) -> dict[str, Any]:
        """Read typed configuration values from ``path``.

        Raises:
            ConfigError: If the file is malformed or names an unknown key
            FileNotFoundError: If the file does not exist

        """
        text = await anyio.Path(path).read_text(encoding='utf-8')
        values = parse_config_text(text)
        logger.debug('Read %d configuration keys from %s', len(values), path)
        return values
