"""Verification of multidimensional basic hypergeometric identities by lattice summation."""
