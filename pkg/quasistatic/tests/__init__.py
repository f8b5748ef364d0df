"""Test package for quasistatic."""
