"""Dataflow matrix machine commands."""
