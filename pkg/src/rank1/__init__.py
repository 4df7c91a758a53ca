"""Heat, Bessel-Green-Riesz and zonal kernels, operator factorizations and
inequality probes on quaternionic hyperbolic spaces and the Cayley plane."""

from .ball_geometry import RadialProfile, SpaceDescriptor, space_descriptor

__version__ = "0.1.0"

__all__ = ["RadialProfile", "SpaceDescriptor", "space_descriptor", "__version__"]
