"""Exact equations for loci where foliation leaves meet a subvariety in excess
dimension, plus Gauss-Manin connections, Picard-Fuchs operators and
symplectic pairings for odd hyperelliptic families."""

from .algebra import Ideal, eliminate, groebner_basis, parse_poly, parse_rational, poly_ring
from .errors import FoliationLociError, ParseError
from .foliation import AffineChart, Foliation, flow_jet, make_foliation, subfoliation_family
from .gauss_manin import DeRhamForm, HyperellipticFamily, gauss_manin_matrix, picard_fuchs
from .multiplicity import OrderBoundPolicy, leaf_multiplicity_oracle, multiplicity_operators
from .periods import numeric_period_oracle, pairing_matrix, residue_pairing, symplectic_normalize
from .sigma import a_locus, constructible_difference, project_closure, sigma_equations

__all__ = [
    "AffineChart",
    "DeRhamForm",
    "Foliation",
    "FoliationLociError",
    "HyperellipticFamily",
    "Ideal",
    "OrderBoundPolicy",
    "ParseError",
    "a_locus",
    "constructible_difference",
    "eliminate",
    "flow_jet",
    "gauss_manin_matrix",
    "groebner_basis",
    "leaf_multiplicity_oracle",
    "make_foliation",
    "multiplicity_operators",
    "numeric_period_oracle",
    "pairing_matrix",
    "parse_poly",
    "parse_rational",
    "picard_fuchs",
    "poly_ring",
    "project_closure",
    "residue_pairing",
    "sigma_equations",
    "subfoliation_family",
    "symplectic_normalize",
]
