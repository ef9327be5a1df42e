"""Bi-orthogonal matrix polynomials with respect to a vector of linear functionals."""
