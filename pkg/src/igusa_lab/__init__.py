"""Newton polyhedra, exponential sums mod p^m and their face decompositions."""

from .poly import Polynomial, parse_polynomial, quasi_weights, substitute_torus
from .newton import newton_polyhedron, enumerate_faces, sigma_kappa
from .charsums import S_sum, T_sum, E_sum, E_sum_ext, S_sum_laurent

__version__ = "0.1.0"

__all__ = [
    "Polynomial",
    "parse_polynomial",
    "quasi_weights",
    "substitute_torus",
    "newton_polyhedron",
    "enumerate_faces",
    "sigma_kappa",
    "S_sum",
    "T_sum",
    "E_sum",
    "E_sum_ext",
    "S_sum_laurent",
]
