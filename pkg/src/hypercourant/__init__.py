"""Exact verification of (para-)hypersymplectic structures on Courant algebroids.

The function algebra of T*[2]A[1] over a point is modelled as an exterior
algebra on A ⊕ A* with exact rational coefficients; Courant structures,
endomorphisms, torsions and the Lie (bi)algebroid constructions are built on
the big bracket.
"""

__version__ = "0.1.0"

from .algebroid import (
    Bivector,
    FormTriple,
    LieStructure,
    TheoremInputs,
    TwoForm,
    abelian,
    check_eps_hyper_lie,
    check_hyper_with_torsion,
    lie_from_constants,
    theorem_suite,
)
from .courant import (
    CourantStructure,
    Endomorphism,
    axioms_pre_courant,
    deform,
    dorfman,
    is_courant,
    nijenhuis_torsion,
)
from .gca import BasisSpec, GradedElement, big_bracket, pairing, theta, xi
from .hyper import (
    EpsilonTriple,
    HyperkahlerQuad,
    HyperTriple,
    check_eps_hypersymplectic,
    classify,
    from_hyperkahler,
    metric,
    swap_structure,
    to_hyperkahler,
    transition,
)
from .instances import para_triple, quaternionic_triple
from .report import CheckReport

__all__ = [
    "BasisSpec",
    "Bivector",
    "CheckReport",
    "CourantStructure",
    "Endomorphism",
    "EpsilonTriple",
    "FormTriple",
    "GradedElement",
    "HyperTriple",
    "HyperkahlerQuad",
    "LieStructure",
    "TheoremInputs",
    "TwoForm",
    "__version__",
    "abelian",
    "axioms_pre_courant",
    "big_bracket",
    "check_eps_hyper_lie",
    "check_eps_hypersymplectic",
    "check_hyper_with_torsion",
    "classify",
    "deform",
    "dorfman",
    "from_hyperkahler",
    "is_courant",
    "lie_from_constants",
    "metric",
    "nijenhuis_torsion",
    "pairing",
    "para_triple",
    "quaternionic_triple",
    "swap_structure",
    "theorem_suite",
    "theta",
    "to_hyperkahler",
    "transition",
    "xi",
]
