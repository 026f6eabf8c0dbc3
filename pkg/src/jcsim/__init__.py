"""Exact density-matrix simulation of matter driven by quantized thermal,
coherent, Fock and cat light fields under a Jaynes-Cummings interaction."""

__version__ = "0.1.0"
