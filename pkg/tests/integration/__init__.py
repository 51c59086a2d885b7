"""Integration tests for rieszbound package."""
