"""Phi-stability of Boolean functions on the discrete cube.

Fourier tools and the noise operator (:mod:`phistab.cube`), convex functionals
(:mod:`phistab.phi`), upper bounds on the maximal stability
(:mod:`phistab.bounds`), threshold equations (:mod:`phistab.roots`),
level-1 weight bounds (:mod:`phistab.fkn`) and an exhaustive small-n oracle
(:mod:`phistab.oracle`).
"""
from .bounds import (BoundResult, gamma_bar, gamma_hat, gamma_tilde, lambda_generic,
                     lambda_statement2, lemma_grid_checks, upsilon_bar)
from .cube import BooleanFunction, FourierSpectrum, decode, dictator, encode, wht
from .phi import PhiSpec, dictator_stability, phi_mutual_information, phi_stability
from .roots import psi, region_threshold, rho_star, theta

__version__ = "0.1.0"

__all__ = [
    "BooleanFunction", "BoundResult", "FourierSpectrum", "PhiSpec", "decode", "dictator",
    "dictator_stability", "encode", "gamma_bar", "gamma_hat", "gamma_tilde", "lambda_generic",
    "lambda_statement2", "lemma_grid_checks", "phi_mutual_information", "phi_stability", "psi",
    "region_threshold", "rho_star", "theta", "upsilon_bar", "wht",
]
