"""FileSystem Port Contract.

Abstract interface for the file operations rieszbound needs: problem files,
solver logs and reports all live in a per-instance workspace directory.
"""

from __future__ import annotations

from typing import TYPE_CHECKING, Protocol

if TYPE_CHECKING:
    from pathlib import Path


class FileSystemPort(Protocol):
    """Port for filesystem operations.

    All methods raise the built-in OSError family on failure; none of them
    interpret file contents.
    """

    async def read_file(self, filepath: Path) -> str:
        """Read file contents as string.

        Args:
            filepath: Path to file

        Returns:
            File contents as UTF-8 string

        Raises:
            FileNotFoundError: If file does not exist
            PermissionError: If file is not readable

        """
        ...

    async def write_file(self, filepath: Path, content: str) -> None:
        """Write string content to file, creating parent directories if needed.

        Args:
            filepath: Path to file
            content: UTF-8 string content

        Raises:
            PermissionError: If file/directory not writable
            OSError: For other filesystem errors (disk full, etc.)

        """
        ...

    async def file_exists(self, filepath: Path) -> bool:
        """Check if a regular file exists.

        Args:
            filepath: Path to check

        Returns:
            True if file exists and is a regular file

        Note:
            Returns False for directories and non-existent paths.
            Does not raise exceptions.

        """
        ...

    async def create_directory(self, directory: Path) -> None:
        """Create directory and all parent directories.

        Args:
            directory: Directory path to create

        Raises:
            FileExistsError: If path exists and is not a directory

        Note:
            If directory already exists, this is a no-op (not an error).

        """
        ...

    async def list_files(self, directory: Path, pattern: str = '*') -> list[Path]:
        """List files in a directory (non-recursive) matching a glob pattern, sorted.

        Args:
            directory: Directory to scan
            pattern: Glob pattern (default: every file)

        Raises:
            FileNotFoundError: If directory does not exist
            NotADirectoryError: If path is not a directory

        """
        ...
