"""Utility helpers: linear algebra, validation, file handling, hashing."""
