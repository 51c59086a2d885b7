"""Contract tests: Protocol compliance verification for port implementations."""
