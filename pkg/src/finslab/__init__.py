"""Numerical Finsler geometry: Minkowski norms, Berwald and Funk spaces, weighted functionals."""
