"""Simulation and exact analysis of Quicksort with randomly erring comparisons."""
__version__ = "0.1.0"
