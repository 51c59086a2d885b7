"""FileSystem adapter implementation.

Concrete implementation of FileSystemPort using anyio for async file operations.
"""

from __future__ import annotations

from pathlib import Path

import anyio


class FileSystemAdapter:
    """Concrete filesystem adapter using anyio.

    Implements FileSystemPort with anyio's async Path operations; all text
    is UTF-8 and files are written with Unix newlines.
    """

    async def read_file(self, filepath: Path) -> str:
        """Read file contents as string.

        Raises:
            FileNotFoundError: If file does not exist
            PermissionError: If file is not readable

        """
        return await anyio.Path(filepath).read_text(encoding='utf-8')

    async def write_file(self, filepath: Path, content: str) -> None:
        """Write string content to file, creating parent directories if needed.

        Raises:
            PermissionError: If file/directory not writable
            OSError: For other filesystem errors

        """
        await anyio.Path(filepath.parent).mkdir(parents=True, exist_ok=True)
        async with await anyio.open_file(filepath, 'w', encoding='utf-8', newline='\n') as handle:
            await handle.write(content)

    async def file_exists(self, filepath: Path) -> bool:
        """Check if a regular file exists."""
        target = anyio.Path(filepath)
        return await target.exists() and await target.is_file()

    async def create_directory(self, directory: Path) -> None:
        """Create directory and all parent directories.

        Raises:
            FileExistsError: If path exists and is not a directory

        """
        target = anyio.Path(directory)
        if await target.exists() and not await target.is_dir():
            msg = f'Path exists but is not a directory: {directory}'
            raise FileExistsError(msg)
        await target.mkdir(parents=True, exist_ok=True)

    async def list_files(self, directory: Path, pattern: str = '*') -> list[Path]:
        """List files in a directory matching a glob pattern, sorted.

        Raises:
            FileNotFoundError: If directory does not exist
            NotADirectoryError: If path is not a directory

        """
        target = anyio.Path(directory)
        if not await target.exists():
            msg = f'Directory not found: {directory}'
            raise FileNotFoundError(msg)
        if not await target.is_dir():
            msg = f'Not a directory: {directory}'
            raise NotADirectoryError(msg)
        return sorted([Path(p) async for p in target.glob(pattern) if await p.is_file()])
