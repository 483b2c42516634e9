"""Numerical layer for canonical systems ``J y' - B(t) y = Delta(t) f``."""
