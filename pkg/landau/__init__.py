"""Numerical layer: the truncated Landau model on the plane and its identity checks."""
