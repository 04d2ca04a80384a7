from .certificate import (
    Lemma21Certificate,
    averaging_mass,
    boundary_holder_constant,
    regularization_gap_constant,
    verify_lemma21,
)
from .modulus import ExponentFit, ModulusCurve, fit_exponent, modulus
from .stability import StabilityReport, admissible_gamma, stability_check
