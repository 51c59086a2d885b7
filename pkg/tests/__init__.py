"""Test suite for rieszbound package."""
