"""Load configuration use case."""

from __future__ import annotations

import logging
from typing import TYPE_CHECKING, Any

from pydantic import ValidationError

from rieszbound.domain.entities import Config
from rieszbound.domain.exceptions import ConfigError

if TYPE_CHECKING:
    from collections.abc import Mapping
    from pathlib import Path

    from rieszbound.ports.config_source import ConfigSourcePort

logger = logging.getLogger(__name__)


def _describe(error: ValidationError) -> str:
    return '; '.join(f'{".".join(map(str, item["loc"])) or "config"}: {item["msg"]}' for item in error.errors())


class LoadConfigUseCase:
    """Use case for merging defaults, a configuration file and command-line overrides."""

    def __init__(self, source: ConfigSourcePort) -> None:
        """Initialize the use case.

        Args:
            source: Configuration source port reading key-value files

        """
        self.source = source

    async def execute(self, path: Path | None, overrides: Mapping[str, Any]) -> Config:
        """Build a validated configuration.

        Args:
            path: Optional configuration file
            overrides: Values given on the command line; None entries are ignored

        Returns:
            The validated configuration

        Raises:
            ConfigError: If the file is missing or malformed, or the merged values are invalid

        """
        values: dict[str, Any] = {}
        if path is not None:
            try:
                values.update(await self.source.load(path))
            except FileNotFoundError as e:
                msg = f'Configuration file not found: {path}'
                raise ConfigError(msg) from e
        values.update({key: value for key, value in overrides.items() if value is not None})
        if values.get('u_threshold') is not None and 'u_mode' not in values:
            values['u_mode'] = 'explicit'
        try:
            config = Config.model_validate(values)
        except ValidationError as e:
            raise ConfigError(_describe(e)) from e
        logger.debug('Configuration %s: %s', config.config_hash(), config.instance_title())
        return config
