"""Integration tests for the LFCPA tools."""
