"""Upper bounds on the maximal Phi-stability at a given mean."""
from __future__ import annotations

from .asymmetric import (AuxValues, LemmaReport, asym_aux, asym_dh, asym_h, asym_varphi,
                         gamma_tilde, lemma_grid_checks, t_domain_lo)
from .generic import InfeasibleStartsError, lambda_generic
from .results import BoundResult, RegimeError, SZDistribution
from .symmetric import gamma_bar, gamma_hat, lambda_statement2, two_point_value, upsilon_bar

# CLI spellings -> evaluators taking (a, rho, spec, **options)
BOUND_KINDS = ("gamma-bar", "gamma-hat", "lambda2", "gamma-tilde", "upsilon", "lambda-generic")


def evaluate(kind: str, a: float, rho: float, spec, **options) -> BoundResult:
    """Dispatch by kind name (CLI spelling or function name)."""
    key = kind.replace("_", "-")
    if key == "gamma-bar":
        return gamma_bar(a, rho, spec, **options)
    if key == "gamma-hat":
        return gamma_hat(a, rho, spec, **options)
    if key in ("lambda2", "lambda-statement2"):
        return lambda_statement2(a, rho, spec, **options)
    if key == "gamma-tilde":
        return gamma_tilde(a, rho, spec, **options)
    if key in ("upsilon", "upsilon-bar"):
        if a != 0.5:
            raise RegimeError("upsilon is defined at mean a = 1/2 only")
        return upsilon_bar(rho, spec, **options)
    if key == "lambda-generic":
        return lambda_generic(a, rho, spec, **options)
    raise ValueError(f"unknown bound kind {kind!r}; choose from {', '.join(BOUND_KINDS)}")


__all__ = [
    "AuxValues", "BOUND_KINDS", "BoundResult", "InfeasibleStartsError", "LemmaReport",
    "RegimeError", "SZDistribution", "asym_aux", "asym_dh", "asym_h", "asym_varphi", "evaluate",
    "gamma_bar", "gamma_hat", "gamma_tilde", "lambda_generic", "lambda_statement2",
    "lemma_grid_checks", "t_domain_lo", "two_point_value", "upsilon_bar",
]
