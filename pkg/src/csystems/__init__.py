"""Workbench for C-systems: instances, axiom checks, subsystems and regular quotients."""
__version__ = "0.1.0"
