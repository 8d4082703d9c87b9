"""Unit tests for the LFCPA tools."""
