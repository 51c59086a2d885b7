"""Unit tests for rieszbound package."""
