"""Interval expression command."""
