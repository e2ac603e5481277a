"""Sigma invariants over CAT(0) models: pushes, lags and Novikov obstructions."""

from ._sgm import (
    SCHEMA_VERSION,
    ParseError,
    Scenario,
    SigmaError,
    comparison_laws,
    load_scenario,
    novikov_laws,
    parse_scenario,
    shift_laws,
    valuation_laws,
    verify_certificate,
    verify_file,
)

__all__ = [
    "SCHEMA_VERSION",
    "ParseError",
    "Scenario",
    "SigmaError",
    "comparison_laws",
    "load_scenario",
    "novikov_laws",
    "parse_scenario",
    "shift_laws",
    "valuation_laws",
    "verify_certificate",
    "verify_file",
]
