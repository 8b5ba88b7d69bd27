"""Exact convex-relaxation analysis of ReLU networks.

Rational-arithmetic analyzers (interval, linear-bound, triangle LP,
joint hull), constructive encodings of piecewise-linear functions that
those analyzers bound precisely, a rewrite calculus for single-kink
networks, and brute-force oracles to check it all against.
"""

from .analyzers import (
    AnalysisResult,
    Box,
    LinearBoundPair,
    RELAXATIONS,
    analyze,
    deeppoly,
    ibp,
    multineuron_single_layer,
    triangle,
)
from .checker import (
    BoxFamily,
    PrecisionReport,
    Table1Report,
    breakpoint_spans,
    check_precise,
    table1_matrix,
)
from .constructors import (
    EncodingSpec,
    convex_encoding,
    dp0_precise_convex,
    dp1_substitute,
    ibp_monotone,
    mn_single_layer,
    step_network,
)
from .cpwl import Cpwl1D, FunctionClass, classify, exact_range, random_cpwl
from .hull import HullPolygon, convex_hull_2d, hull_contains, hull_sum
from .lp import LinProgram, LpInfeasible, LpOptimal, LpUnbounded, lp_solve
from .network import (
    KinkHyperplane,
    NetworkBuilder,
    Neuron,
    ReluNetwork,
    classify_relu_stability,
    evaluate,
    to_cpwl,
)
from .oracle import (
    exact_hull_univariate,
    exact_range_multivariate,
    exact_range_univariate,
)
from .rational import Q, format_rational, parse_rational
from .rewrites import (
    FormedBase,
    FormedLayer,
    FormedNetwork,
    MisalignedReluError,
    collapse_to_single_layer,
    random_formed,
    simplify_composed,
    simplify_relu_sum,
    to_network_form,
    to_relu_network,
    verify_replacement,
)

__version__ = "0.1.0"
