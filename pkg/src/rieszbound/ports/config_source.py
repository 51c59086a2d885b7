"""Configuration source Port Contract."""

from __future__ import annotations

from typing import TYPE_CHECKING, Any, Protocol

if TYPE_CHECKING:
    from pathlib import Path


class ConfigSourcePort(Protocol):
    """Port for reading configuration values from a file."""

    async def load(self, path: Path) -> dict[str, Any]:
        """Read typed configuration values.

        Args:
            path: Configuration file

        Returns:
            Mapping of configuration keys to typed values

        Raises:
            ConfigError: If the file is malformed or names an unknown key
            FileNotFoundError: If the file does not exist

        """
        ...
