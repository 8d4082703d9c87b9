"""Tests for the LFCPA tools."""
