"""Proxy pattern-mixture sensitivity analysis for nonignorable nonresponse."""

from ._ppmm import (
    IdentifiedModel,
    Mechanism,
    ObservedSummary,
    PatternMoments,
    PpmmError,
    SelectionCoefficients,
    analyze,
    builtin_mechanism,
    builtin_mechanisms,
    g_factor,
    identify,
    lambda_coefficients,
    load_mechanisms,
    make_phi_grid,
    marginal_mean,
    mc_recover_lambdas,
    parse_mechanisms,
    phi_validity_bound,
    simulate,
    sweep_mean,
    sweep_or,
    sweep_prob,
    validate,
)

__version__ = "0.1.0"
