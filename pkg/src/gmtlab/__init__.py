"""Desk-scale geometric measure theory: chains, flat norms, filling radii and metric estimates."""

__version__ = "0.1.0"
