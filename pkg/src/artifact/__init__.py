"""Automata networks: dynamics, simulation, glueing and gadget compilers."""

__version__ = "0.1.0"
