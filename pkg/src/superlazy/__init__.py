"""Superlazy cut elimination for pure proof nets."""
