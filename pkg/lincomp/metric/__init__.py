"""Relaxed metric command."""
