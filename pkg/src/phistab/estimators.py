"""scikit-learn style transformers over truth-table matrices.

Each row of ``X`` is a truth table of length ``2**n`` with 0/1 entries (point
index order as in :mod:`phistab.cube`). The bound evaluators stay plain
functions; these wrappers only make the per-function quantities usable in
pipelines.
"""
from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_array, check_is_fitted

from .cube import fwht, ifwht, popcounts
from .phi import PhiSpec, stability_many

STAB_FEATURES = ("stability", "mutual_information", "mean")


def check_tables(X) -> np.ndarray:
    """Validate a truth-table matrix and return it as ``uint8``."""
    X = check_array(X, dtype=None, ensure_2d=True)
    size = X.shape[1]
    if size & (size - 1):
        raise ValueError(f"row length {size} is not a power of two")
    if not np.all((X == 0) | (X == 1)):
        raise ValueError("truth tables must contain only 0 and 1")
    return X.astype(np.uint8)


class _TableTransformer(TransformerMixin, BaseEstimator):
    def fit(self, X, y=None):
        X = check_tables(X)
        self.n_features_in_ = X.shape[1]
        self.n_bits_ = X.shape[1].bit_length() - 1
        return self

    def _validated(self, X):
        check_is_fitted(self, "n_bits_")
        X = check_tables(X)
        if X.shape[1] != self.n_features_in_:
            raise ValueError(f"expected rows of length {self.n_features_in_}, got {X.shape[1]}")
        return X


class FourierTransformer(_TableTransformer):
    """Rows of Fourier coefficients (column ``m`` is the subset with mask ``m``)."""

    def transform(self, X):
        return fwht(self._validated(X))

    def inverse_transform(self, C):
        check_is_fitted(self, "n_bits_")
        return np.rint(ifwht(np.asarray(C, dtype=float))).astype(np.uint8)


class DegreeWeightTransformer(_TableTransformer):
    """Rows of Fourier weight per degree ``0..n``."""

    def transform(self, X):
        X = self._validated(X)
        sq = fwht(X) ** 2
        deg = popcounts(self.n_bits_)
        return np.stack([sq[:, deg == k].sum(axis=1) for k in range(self.n_bits_ + 1)], axis=1)


class StabilityTransformer(_TableTransformer):
    """Phi-stability features at correlation ``rho``."""

    def __init__(self, rho=0.5, alpha=1.0, symmetric=False, kind="log",
                 features=("stability",)):
        self.rho = rho
        self.alpha = alpha
        self.symmetric = symmetric
        self.kind = kind
        self.features = features

    def fit(self, X, y=None):
        super().fit(X, y)
        bad = [f for f in self.features if f not in STAB_FEATURES]
        if bad:
            raise ValueError(f"unknown features {bad}; choose from {STAB_FEATURES}")
        self.spec_ = PhiSpec(self.alpha, self.symmetric, self.kind)
        return self

    def transform(self, X):
        X = self._validated(X)
        stab = stability_many(X, self.spec_, self.rho)
        mean = X.mean(axis=1)
        cols = {"stability": stab, "mean": mean,
                "mutual_information": stab - np.asarray(self.spec_(mean))}
        return np.stack([cols[f] for f in self.features], axis=1)

    def get_feature_names_out(self, input_features=None):
        return np.array(list(self.features), dtype=object)
