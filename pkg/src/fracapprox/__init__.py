"""Rational approximation on self-similar fractals.

Subpackages:
  geometry     exact and floating-point Euclidean primitives
  ifs          self-similar systems, their attractors and natural measures
  diagnostics  empirical doubling / decay / regularity certificates
  approx       approximation functions, rational enumeration, layer tests
  analysis     convergence sums, cover constructions, dimension bounds
  cli          reproducible experiment runner
"""

__version__ = "0.1.0"
