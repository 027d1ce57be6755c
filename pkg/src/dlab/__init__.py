"""Binary quadratic forms and Pell-equation classes applied to D(-1) tuples."""

from .forms import (
    Form, Matrix, compose, discriminant, equivalence_matrix, equivalent, identity_form, inverse,
    leading_coefficient_roots, principal_representation, reduce, transform,
)
from .pell import (
    PellSurface, Representation, belongs_to, equivalent_solutions, fundamental_unit,
    has_primitive_solution, solve_classes, unit_orbit,
)
from .tuples import (
    QuadCandidate, TripleWitness, WitnessPQ, extract_witness, gcd_chain, is_dminus1_tuple,
    lemma41_prunes, lemma42_x_filter, quadruple_scan, theorem11_exclusions, theorem12_check,
    theorem15_check, triples_for,
)

__version__ = "0.1.0"
