"""End-to-end runs against a real CSDP binary."""

from __future__ import annotations

from typing import TYPE_CHECKING

import pytest

from tests.conftest import invoke_asyncclick_command

if TYPE_CHECKING:
    from pathlib import Path

BIPYRAMID_S1 = 6.474691494688162


def _fields(stdout: str) -> dict[str, str]:
    return dict(line.split(' = ', 1) for line in stdout.splitlines())


@pytest.mark.solver
@pytest.mark.slow
def test_smallest_relaxation_is_safe(tmp_path: Path, csdp_command: str) -> None:
    """The d = 0, delta = 2 bound lies below the bipyramid energy and its constraints hold."""
    exit_code, stdout, stderr = invoke_asyncclick_command([
        'rbound', '--workdir', str(tmp_path), '--solver-cmd', csdp_command, '--samples', '200', 'run',
    ])

    assert exit_code == 0, stderr
    fields = _fields(stdout)
    assert float(fields['bound']) <= BIPYRAMID_S1 + 1e-6
    assert fields['verdict'] == 'PASS'


@pytest.mark.solver
@pytest.mark.slow
def test_higher_degree_does_not_weaken(tmp_path: Path, csdp_command: str) -> None:
    """Raising the SOS degree can only tighten the bound."""
    bounds = []
    for delta in ('2', '4'):
        exit_code, stdout, stderr = invoke_asyncclick_command([
            'rbound', '--workdir', str(tmp_path), '--solver-cmd', csdp_command, '--samples', '0',
            '--d', '2', '--delta', delta, 'run',
        ])
        assert exit_code == 0, stderr
        bounds.append(float(_fields(stdout)['bound']))

    assert bounds[1] >= bounds[0] - 1e-5


@pytest.mark.solver
@pytest.mark.slow
def test_full_level_matches_enumeration(tmp_path: Path, csdp_command: str) -> None:
    """At level t = N the finite relaxation equals the brute-force minimum."""
    exit_code, stdout, stderr = invoke_asyncclick_command([
        'rbound', '--workdir', str(tmp_path), '--solver-cmd', csdp_command, '--seed', '5',
        'oracle', '--points', '7', '--choose', '3',
    ])

    assert exit_code == 0, stderr
    fields = _fields(stdout)
    brute = float(fields['brute_force'])
    assert float(fields['relaxation']) == pytest.approx(brute, rel=1e-5)
    assert float(fields['cardinality_1'].split()[0]) == pytest.approx(3, abs=1e-4)


@pytest.mark.solver
@pytest.mark.slow
def test_low_level_is_a_lower_bound(tmp_path: Path, csdp_command: str) -> None:
    """Below t = N the relaxation never exceeds the minimum."""
    exit_code, stdout, stderr = invoke_asyncclick_command([
        'rbound', '--workdir', str(tmp_path), '--solver-cmd', csdp_command, '--seed', '5',
        'oracle', '--points', '7', '--choose', '4', '--t', '1',
    ])

    assert exit_code == 0, stderr
    fields = _fields(stdout)
    assert float(fields['relaxation']) <= float(fields['brute_force']) + 1e-5


@pytest.mark.solver
@pytest.mark.slow
def test_levels_climb_to_enumeration(tmp_path: Path, csdp_command: str) -> None:
    """On eight points choosing three, L1 <= L2 <= L3 and L3 is the brute-force minimum."""
    relaxations = []
    for level in ('1', '2', '3'):
        exit_code, stdout, stderr = invoke_asyncclick_command([
            'rbound', '--workdir', str(tmp_path), '--solver-cmd', csdp_command, '--seed', '11',
            'oracle', '--points', '8', '--choose', '3', '--t', level,
        ])
        assert exit_code == 0, stderr
        fields = _fields(stdout)
        relaxations.append(float(fields['relaxation']))

    assert relaxations[0] <= relaxations[1] + 1e-5
    assert relaxations[1] <= relaxations[2] + 1e-5
    assert relaxations[2] == pytest.approx(float(fields['brute_force']), rel=1e-5)
    for size, expected in ((1, 3), (2, 3), (3, 1)):
        assert float(fields[f'cardinality_{size}'].split()[0]) == pytest.approx(expected, abs=1e-4)
