"""Bernstein factors, open-up maps and extremal polynomials on analytic arcs."""

__version__ = "0.1.0"
