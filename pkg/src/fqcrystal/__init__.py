"""Fourier quasicrystals built from trigonometric maps.

Exact lattice and polytope tools, Laurent and trigonometric maps, genericity
and amoeba probes, root finding, the Example-1 and cut-and-project
constructions, and discrete-measure utilities.
"""
__version__ = "0.1.0"

from .lattice import smith_normal_form, unimodular_completion, annihilator  # noqa: E402
from .polytope import convex_hull, minkowski_sum, mixed_volume, is_unfolded  # noqa: E402
from .polyring import LaurentPoly, LaurentMap, TrigMapRep  # noqa: E402

__all__ = [
    "__version__",
    "smith_normal_form",
    "unimodular_completion",
    "annihilator",
    "convex_hull",
    "minkowski_sum",
    "mixed_volume",
    "is_unfolded",
    "LaurentPoly",
    "LaurentMap",
    "TrigMapRep",
]
