"""Core numerical components."""
