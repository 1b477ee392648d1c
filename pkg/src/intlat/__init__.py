"""Integrable lattice models: Painleve III Ising scaling functions, chiral
Potts transfer matrices and quasiparticle exclusion counting."""

from . import chiral_potts, painleve, quasiparticle, special_functions
from .kernels import BACKEND
from .special_functions import ToleranceSpec

__version__ = "0.1.0"

__all__ = ["BACKEND", "ToleranceSpec", "chiral_potts", "painleve", "quasiparticle", "special_functions"]
