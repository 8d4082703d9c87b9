"""Unit tests for command-line tools."""
