"""Information geometry of economies modelled as quantum circuits.

Submodules
----------
pauli         Pauli strings, commutators, su(2^n) coordinates
circuit       primitive qudit gates and circuit compilation
qubit         single-qubit evolution and Bloch trajectories
geometry      entropy metric, geodesics, unsustainability fields
tomography    direct-inversion state reconstruction
open_system   thermodynamic-length metrics and geodesics
complexity    penalty-metric complexity and the K variation equation
config, render, cli   command-line front end
"""
from .errors import ConfigError, DimensionError, DomainError, GeoEconError

__version__ = "0.1.0"

__all__ = ["ConfigError", "DimensionError", "DomainError", "GeoEconError", "__version__"]
