"""Signed sampler commands."""
