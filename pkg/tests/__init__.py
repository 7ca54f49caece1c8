"""Test suite for sievegaps."""
