"""Capacity evaluators and simulators for state-dependent DMCs with a causal helper."""

__version__ = "0.1.0"
