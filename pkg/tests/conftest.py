"""Test configuration and fixtures."""

from __future__ import annotations

import shutil
import stat
from typing import TYPE_CHECKING

import pytest

if TYPE_CHECKING:
    from pathlib import Path

#: CSDP-style report printed by the fake solver script.
FAKE_CSDP_REPORT = """\
Iter:  9 Ap: 1.00e+00 Pobj:  6.4740000e+00 Ad: 1.00e+00 Dobj:  6.4740000e+00
Success: SDP solved
Primal objective value: 6.4740000000e+00
Dual objective value: 6.4740000100e+00
Relative primal infeasibility: 1.0e-12
Relative dual infeasibility: 1.0e-12
Real Relative Gap: 1.0e-09
XZ Relative Gap: 1.0e-09
"""


def invoke_asyncclick_command(args: list[str], stdin_content: str | None = None) -> tuple[int, str, str]:
    """Invoke an asyncclick command synchronously for testing.

    This helper runs the rbound group in a fresh event loop with sys.argv
    set, capturing stdout and stderr.

    Args:
        args: Command-line arguments including the program name
        stdin_content: Optional stdin input to provide to the command

    Returns:
        Tuple of (exit_code, stdout, stderr)

    Example:
        exit_code, stdout, stderr = invoke_asyncclick_command(['rbound', 'molien', '--delta-max', '4'])

    """
    import asyncio
    import sys
    from io import StringIO

    from rieszbound.cli.main import rbound

    original_argv = sys.argv
    original_stdout = sys.stdout
    original_stderr = sys.stderr
    original_stdin = sys.stdin

    stdout_capture = StringIO()
    stderr_capture = StringIO()
    stdin_input = StringIO(stdin_content) if stdin_content is not None else None
    exit_code = [0]

    try:
        sys.argv = args
        sys.stdout = stdout_capture
        sys.stderr = stderr_capture
        if stdin_input is not None:
            sys.stdin = stdin_input

        async def run_command() -> int:
            result = rbound.main(args=args[1:], standalone_mode=False, prog_name=args[0])
            code = await result if asyncio.iscoroutine(result) else result
            return code if isinstance(code, int) else 0

        try:
            exit_code[0] = asyncio.run(run_command())
        except SystemExit as e:
            exit_code[0] = e.code if isinstance(e.code, int) else 0
    finally:
        sys.argv = original_argv
        sys.stdout = original_stdout
        sys.stderr = original_stderr
        sys.stdin = original_stdin

    return exit_code[0], stdout_capture.getvalue(), stderr_capture.getvalue()


@pytest.fixture
def fake_csdp(tmp_path: Path) -> str:
    """Solver command for a shell script that prints a converged CSDP report.

    The script writes an empty solution file, so solution recovery is
    skipped and only the objectives are read.
    """
    script = tmp_path / 'csdp'
    report = FAKE_CSDP_REPORT.replace("'", '')
    script.write_text(f"#!/bin/sh\n: > \"$2\"\ncat <<'EOF'\n{report}EOF\n", encoding='utf-8')
    script.chmod(script.stat().st_mode | stat.S_IEXEC)
    return f'{script} {{input}} {{output}}'


@pytest.fixture
def csdp_command() -> str:
    """Command for a real CSDP binary; skips the test when it is absent."""
    if shutil.which('csdp') is None:
        pytest.skip('csdp is not on PATH')
    return 'csdp {input} {output}'
