"""Workspace naming adapter.

Instance ids join a python-slugify slug of the instance title with a short
sqids encoding of the configuration digest.
"""

from __future__ import annotations

from slugify import slugify as python_slugify
from sqids import Sqids

#: Hex digits of the digest carried by the short id.
DIGEST_PREFIX_LENGTH = 8


class WorkspaceNamingAdapter:
    """Concrete workspace port using python-slugify and sqids."""

    def __init__(self, min_length: int = 5) -> None:
        """Initialize the adapter.

        Args:
            min_length: Minimum length of the short id (default: 5)

        """
        self._sqids = Sqids(min_length=min_length)

    def slugify(self, text: str) -> str:
        """Lowercase kebab-case slug of ``text``.

        Raises:
            ValueError: If input produces an empty slug

        """
        if not text or not text.strip():
            msg = 'Cannot slugify empty or whitespace-only text'
            raise ValueError(msg)
        slug = python_slugify(text, lowercase=True, separator='-')
        if not slug:
            msg = f'Input produced empty slug: {text!r}'
            raise ValueError(msg)
        return slug

    def instance_id(self, title: str, digest: str) -> str:
        """``<slug>-<short id>`` for a title and a hex digest.

        Raises:
            ValueError: If the title slug is empty or the digest is not hex

        """
        try:
            counter = int(digest[:DIGEST_PREFIX_LENGTH], 16)
        except ValueError as e:
            msg = f'Digest must be hexadecimal, got {digest!r}'
            raise ValueError(msg) from e
        return f'{self.slugify(title)}-{self._sqids.encode([counter])}'

    def digest_prefix(self, instance_id: str) -> str | None:
        """Leading digest digits encoded in an instance id, or None."""
        short_id = instance_id.rsplit('-', 1)[-1]
        decoded = self._sqids.decode(short_id)
        if len(decoded) != 1:
            return None
        return f'{decoded[0]:0{DIGEST_PREFIX_LENGTH}x}'
