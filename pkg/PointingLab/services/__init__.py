"""Numerical kernels: special functions, array patterns, pointing-error and channel models, Monte-Carlo oracle."""
