"""External SDP solver adapter.

Runs a solver command template such as ``csdp {input} {output}`` or
``sdpa -ds {input} -o {output}`` with anyio's subprocess support.
"""

from __future__ import annotations

import logging
import shlex
import shutil
import time
from typing import TYPE_CHECKING

import anyio

from rieszbound.domain.entities import SolverRun
from rieszbound.domain.exceptions import SolverNotFoundError

if TYPE_CHECKING:
    from pathlib import Path

logger = logging.getLogger(__name__)


class ExternalSolverAdapter:
    """Concrete solver port backed by a subprocess.

    Implements SolverPort. The template is split with shell rules, then
    placeholders are substituted per argument, so paths with spaces survive.
    """

    def __init__(self, command: str) -> None:
        """Initialize the adapter.

        Args:
            command: Command template containing ``{input}`` and optionally ``{output}``

        Raises:
            ValueError: If the template is empty or lacks ``{input}``

        """
        arguments = shlex.split(command)
        if not arguments:
            msg = 'Solver command is empty'
            raise ValueError(msg)
        if not any('{input}' in argument for argument in arguments):
            msg = f'Solver command {command!r} has no {{input}} placeholder'
            raise ValueError(msg)
        self.template = arguments

    def command_for(self, input_path: Path, output_path: Path) -> list[str]:
        """The argument vector for one run."""
        return [argument.format(input=str(input_path), output=str(output_path)) for argument in self.template]

    async def solve(self, input_path: Path, output_path: Path) -> SolverRun:
        """Run the solver and capture its output.

        Raises:
            SolverNotFoundError: If the executable is not on PATH

        """
        command = self.command_for(input_path, output_path)
        if shutil.which(command[0]) is None:
            msg = f'Solver executable {command[0]!r} not found on PATH'
            raise SolverNotFoundError(msg)
        logger.info('Running %s', shlex.join(command))
        started = time.perf_counter()
        try:
            process = await anyio.run_process(command, check=False)
        except FileNotFoundError as e:
            msg = f'Solver executable {command[0]!r} could not be started'
            raise SolverNotFoundError(msg) from e
        seconds = time.perf_counter() - started
        stdout = process.stdout.decode('utf-8', errors='replace')
        stderr = process.stderr.decode('utf-8', errors='replace')
        if stderr.strip():
            logger.warning('Solver wrote to stderr: %s', stderr.strip().splitlines()[-1])
        logger.info('Solver exited with code %d after %.2fs', process.returncode, seconds)
        return SolverRun(command=command, returncode=process.returncode, stdout=stdout, stderr=stderr, seconds=seconds)
