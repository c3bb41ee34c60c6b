"""Signed measure and operator commands."""
