"""Siegel invariants of ray classes of cyclotomic CM fields, from theta
constants at CM points."""

from .bigcomplex import BigComplex, BigReal, agree_to_digits, e_of
from .cmdata import CmContext, RiemannFormSpec, compute_mc, gram_matrix, psi_embed, type_norm
from .cyclofield import CycloElem, CycloIdeal, conjugate, embed, galois_apply, norm_to_Q, trace_to_Q
from .rayclass import (
    CharacterValue,
    RayClass,
    RayClassTable,
    cm_point,
    compute_invariants,
    enumerate_ray_classes,
    independence_check,
    r_vector,
    siegel_invariant,
    stickelberger_sum,
)
from .symplectic import SiegelPoint, act_on_H, char_permute, is_symplectic, symplectic_reduce
from .theta import (
    CharSets,
    ThetaChar,
    TruncationPlan,
    big_theta,
    build_char_sets,
    classify_char,
    plan_truncation,
    siegel_function,
    theta_eval,
)

__all__ = [
    "BigComplex",
    "BigReal",
    "CharSets",
    "CharacterValue",
    "CmContext",
    "CycloElem",
    "CycloIdeal",
    "RayClass",
    "RayClassTable",
    "RiemannFormSpec",
    "SiegelPoint",
    "ThetaChar",
    "TruncationPlan",
    "act_on_H",
    "agree_to_digits",
    "big_theta",
    "build_char_sets",
    "char_permute",
    "classify_char",
    "cm_point",
    "compute_invariants",
    "compute_mc",
    "conjugate",
    "e_of",
    "embed",
    "enumerate_ray_classes",
    "galois_apply",
    "gram_matrix",
    "independence_check",
    "is_symplectic",
    "norm_to_Q",
    "plan_truncation",
    "psi_embed",
    "r_vector",
    "siegel_function",
    "siegel_invariant",
    "stickelberger_sum",
    "symplectic_reduce",
    "theta_eval",
    "trace_to_Q",
    "type_norm",
]

__version__ = "0.1.0"
