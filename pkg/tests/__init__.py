"""Test modules for the determinantal lab."""
