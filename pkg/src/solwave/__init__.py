"""Solitary traveling-wave solutions via the tanh/sech ansatz with a free integration constant."""

__version__ = "0.1.0"
