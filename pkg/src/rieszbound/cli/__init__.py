"""CLI layer: the rbound command group."""

from rieszbound.cli.main import main

__all__ = ['main']
