"""Configuration-space calculus on finite weighted site models.

Star-convolution of functions on finite (multi)configurations, the K-transform
and its inverse, Wick pairings, correlation measures of lattice point
processes, the realizability inverse problem, and a finite-dimensional check
of the spectral representation of the star-multiplication operators.
"""

from .ground import Configuration, GroundSpace, MultiConfiguration
from .measures import FiniteConfigMeasure, ProcessLaw, correlation_measure, reconstruct_process
from .star import OneParticleFunction, RankedFunction, star, star_fast, star_naive
from .transforms import ObservableFunction, k_transform, r_transform

__version__ = "0.1.0"

__all__ = [
    "Configuration",
    "FiniteConfigMeasure",
    "GroundSpace",
    "MultiConfiguration",
    "ObservableFunction",
    "OneParticleFunction",
    "ProcessLaw",
    "RankedFunction",
    "correlation_measure",
    "k_transform",
    "r_transform",
    "reconstruct_process",
    "star",
    "star_fast",
    "star_naive",
]
