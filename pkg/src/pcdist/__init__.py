"""Weighted d-DNNF probabilistic circuits: exact counting and sampling,
network-polynomial evaluation, and closeness/equivalence testing."""

from .circuit import (
    CapabilityError,
    Circuit,
    CircuitBuilder,
    Determinism,
    Kind,
    Node,
    StructuralError,
    StructuralReport,
    check_decomposable,
    check_deterministic,
    evaluate,
    is_smooth,
    smooth,
    structural_report,
)
from .closeness import Decision, TeqParams, TeqTrace, Verdict, peq, sample_size, teq, tv_bound_report
from .engine import (
    OracleParams,
    UnsatisfiableError,
    awct,
    netpoly_eval,
    samp,
    sample,
    sample_many,
    wmc_exact,
)
from .formats import CNF, ParseError, parse_dimacs_cnf, parse_nnf, parse_weights, write_dimacs_cnf, write_nnf, write_weights
from .oracle import empirical_l1, enumerate_models, exact_pmf, tv_exact
from .weights import DyadicWeightFn, WeightFn, chain_formula, dyadic_approx, weight_of, weighted_to_unweighted

__version__ = "0.1.0"
