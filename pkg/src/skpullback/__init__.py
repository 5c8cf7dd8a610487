"""Numerical verification of the pullback formula for nearly holomorphic
Saito-Kurokawa lifts and its supporting explicit formulas."""

__version__ = "0.1.0"
