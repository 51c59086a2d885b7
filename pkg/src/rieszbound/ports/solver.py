"""Solver Port Contract.

Abstract interface for running an external SDP solver on an SDPA-sparse
file. The port only runs the process; reading its report is domain work
(``rieszbound.domain.sdpa``).
"""

from __future__ import annotations

from typing import TYPE_CHECKING, Protocol

if TYPE_CHECKING:
    from pathlib import Path

    from rieszbound.domain.entities import SolverRun


class SolverPort(Protocol):
    """Port for external solver invocation.

    Implementations fill a command template holding ``{input}`` and
    optionally ``{output}`` placeholders and run it to completion.
    """

    async def solve(self, input_path: Path, output_path: Path) -> SolverRun:
        """Run the solver on one problem file.

        Args:
            input_path: SDPA-sparse problem file
            output_path: Where the solver writes its solution or result file

        Returns:
            Exit code and captured output of the run

        Raises:
            SolverNotFoundError: If the solver executable cannot be found

        Note:
            A nonzero exit code is not an error here: CSDP reports partial
            success through its exit status.

        """
        ...
