"""Ports layer: Protocol definitions for files, solvers, workspaces and configuration sources."""
