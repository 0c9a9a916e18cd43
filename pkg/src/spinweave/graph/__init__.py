"""Stabilizer-graph register with swappable pure/compiled kernels."""
