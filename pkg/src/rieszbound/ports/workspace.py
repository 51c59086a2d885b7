"""Workspace Port Contract.

Abstract interface for naming per-instance workspace directories. Names are
readable and stable: the same configuration always maps to the same
directory, so reruns find their earlier files.
"""

from __future__ import annotations

from typing import Protocol


class WorkspacePort(Protocol):
    """Port for workspace instance identifiers."""

    def instance_id(self, title: str, digest: str) -> str:
        """Build a filesystem-safe instance id.

        Args:
            title: Human-readable description of the instance
            digest: Hex digest of the configuration

        Returns:
            ``<slug>-<short id>`` where the short id encodes the digest

        Raises:
            ValueError: If the title produces an empty slug or the digest is not hex

        Example:
            >>> workspace.instance_id('s1 N5 d0 delta2 sym', 'ab12cd34ef567890')
            's1-n5-d0-delta2-sym-...'

        Note:
            Same inputs MUST always produce the same id (deterministic).

        """
        ...

    def digest_prefix(self, instance_id: str) -> str | None:
        """Recover the digest prefix encoded in an instance id.

        Args:
            instance_id: Id produced by ``instance_id``

        Returns:
            The leading hex digits of the digest, or None if the id is not valid

        """
        ...
