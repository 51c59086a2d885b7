"""Integration tests for the solve, verify and run commands with a scripted solver."""

from __future__ import annotations

from typing import TYPE_CHECKING

from tests.conftest import invoke_asyncclick_command

if TYPE_CHECKING:
    from pathlib import Path


def test_run_passes(tmp_path: Path, fake_csdp: str) -> None:
    """A bound below the bipyramid energy passes."""
    exit_code, stdout, stderr = invoke_asyncclick_command([
        'rbound', '--workdir', str(tmp_path / 'runs'), '--solver-cmd', fake_csdp, 'run',
    ])

    assert exit_code == 0, stderr
    assert 'status = OPTIMAL\n' in stdout
    assert 'verdict = PASS\n' in stdout
    assert 'time_solve = ' in stdout
    (instance,) = (tmp_path / 'runs').iterdir()
    for name in ('problem.dat-s', 'config.txt', 'solver.log', 'result.yaml', 'report.txt', 'report.yaml'):
        assert (instance / name).is_file(), name


def test_solve_then_verify(tmp_path: Path, fake_csdp: str) -> None:
    """Verify without a bound reads the stored solver result."""
    base = ['rbound', '--workdir', str(tmp_path), '--solver-cmd', fake_csdp]

    exit_code, stdout, stderr = invoke_asyncclick_command([*base, 'solve'])
    assert exit_code == 0, stderr
    assert 'bound = 6.474\n' in stdout

    exit_code, stdout, stderr = invoke_asyncclick_command([*base, 'verify'])
    assert exit_code == 0, stderr
    assert 'bound = 6.474\n' in stdout
    assert 'verdict = PASS\n' in stdout


def test_verify_without_result(tmp_path: Path) -> None:
    """Nothing to verify before solving."""
    exit_code, _stdout, stderr = invoke_asyncclick_command(['rbound', '--workdir', str(tmp_path), 'verify'])

    assert exit_code == 3
    assert 'run solve first' in stderr


def test_verify_unsafe_bound(tmp_path: Path) -> None:
    """A bound above a known energy exits with code 2."""
    exit_code, stdout, stderr = invoke_asyncclick_command([
        'rbound', '--workdir', str(tmp_path), 'verify', '--bound', '6.5',
    ])

    assert exit_code == 2
    assert 'verdict = FAIL\n' in stdout
    assert 'exceeds the reference energy' in stderr


def test_verify_s2_references(tmp_path: Path) -> None:
    """For s = 2 both five-point energies are reported."""
    exit_code, stdout, _stderr = invoke_asyncclick_command([
        'rbound', '--workdir', str(tmp_path), '--s', '2', 'verify', '--bound', '4.2',
    ])

    assert exit_code == 0
    assert 'energy_bipyramid = 4.25\n' in stdout
    assert 'energy_square_pyramid = ' in stdout
