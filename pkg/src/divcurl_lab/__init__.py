"""Numerical laboratory for div-curl product experiments on the unit box."""

from .grids import (
    Grid,
    ScalarField,
    SkewMatrixField,
    TestFunction,
    VectorField,
    bump,
    dump_field,
    integrate,
    lp_norm,
    make_grid,
    sample,
)
from .diffops import curl_matrix, divergence, grad_div, gradient, laplacian
from .identity import eval_divfree_reduction, eval_identity, eval_prelim_identity
from .lab import (
    OscillatoryFamily,
    SubBox,
    gen_counterexample,
    gen_curlfree,
    gen_divfree,
    hypothesis_check,
    product_test,
    proof_trace,
)
from .poisson import neg_norm_h_minus_1, solve_dirichlet, weak_w1p_limit_check

__version__ = "0.1.0"

__all__ = [
    "Grid",
    "ScalarField",
    "VectorField",
    "SkewMatrixField",
    "TestFunction",
    "OscillatoryFamily",
    "SubBox",
    "make_grid",
    "bump",
    "sample",
    "integrate",
    "lp_norm",
    "dump_field",
    "gradient",
    "divergence",
    "curl_matrix",
    "laplacian",
    "grad_div",
    "solve_dirichlet",
    "neg_norm_h_minus_1",
    "weak_w1p_limit_check",
    "eval_identity",
    "eval_prelim_identity",
    "eval_divfree_reduction",
    "gen_divfree",
    "gen_curlfree",
    "gen_counterexample",
    "product_test",
    "hypothesis_check",
    "proof_trace",
]
