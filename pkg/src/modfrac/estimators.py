"""scikit-learn style transformers over the functional core.

Each row of ``X`` holds the C-order samples of one field on a centered box
of half-width ``grid_l``; the sample count per axis is read off the row
length during ``fit``. Rows may be complex, which is why validation is done
here rather than with ``check_array``.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from .fracint import MultiplierSpec, apply_iab, apply_riesz
from .grid import Field, GridSpec
from .modnorm import decomp_band_norms, mpq_norm_decomp, mpq_norm_stft


def _as_rows(X) -> np.ndarray:
    X = np.asarray(X)
    if X.ndim == 1:
        X = X[None, :]
    if X.ndim != 2:
        raise ValueError(f"expected a 2-D array of samples, got shape {X.shape}")
    if X.shape[0] == 0:
        raise ValueError("need at least one sample")
    if not np.issubdtype(X.dtype, np.number):
        raise ValueError(f"samples must be numeric, got dtype {X.dtype}")
    X = X.astype(complex)
    if not np.all(np.isfinite(X)):
        raise ValueError("samples contain NaN or inf")
    return X


def _grid_for(width: int, dim: int, l: float) -> GridSpec:
    m = round(width ** (1.0 / dim))
    if m ** dim != width:
        raise ValueError(f"row length {width} is not a perfect {dim}-th power")
    return GridSpec(dim, m, l)


class _GridTransformer(TransformerMixin, BaseEstimator):
    def fit(self, X, y=None):
        X = _as_rows(X)
        self.grid_ = _grid_for(X.shape[1], self.dim, self.grid_l)
        self.n_features_in_ = X.shape[1]
        return self

    def _rows(self, X):
        check_is_fitted(self, "grid_")
        X = _as_rows(X)
        if X.shape[1] != self.n_features_in_:
            raise ValueError(f"expected {self.n_features_in_} samples per row, got {X.shape[1]}")
        return [Field(self.grid_, row) for row in X]


class FractionalIntegral(_GridTransformer):
    """Apply ``I_alpha`` (``beta=None``) or ``I_alpha + I_beta`` to each row."""

    def __init__(self, alpha=0.25, beta=None, policy="cell-average", grid_l=16.0, dim=1):
        self.alpha = alpha
        self.beta = beta
        self.policy = policy
        self.grid_l = grid_l
        self.dim = dim

    def fit(self, X, y=None):
        super().fit(X)
        if self.beta is None:
            MultiplierSpec(self.alpha, self.alpha, self.policy).check(self.dim)
        else:
            MultiplierSpec(self.alpha, self.beta, self.policy).check(self.dim)
        return self

    def transform(self, X):
        out = []
        for f in self._rows(X):
            if self.beta is None:
                g = apply_riesz(f, self.alpha, self.policy)
            else:
                g = apply_iab(f, MultiplierSpec(self.alpha, self.beta, self.policy))
            out.append(g.values.reshape(-1))
        return np.array(out)


class ModulationNorm(_GridTransformer):
    """One ``M^{p,q}`` norm per row, by the decomposition or the STFT."""

    def __init__(self, p=2.0, q=2.0, method="decomp", grid_l=16.0, dim=1):
        self.p = p
        self.q = q
        self.method = method
        self.grid_l = grid_l
        self.dim = dim

    def transform(self, X):
        if self.method not in ("decomp", "stft"):
            raise ValueError(f"unknown method {self.method!r}")
        vals = []
        for f in self._rows(X):
            if self.method == "decomp":
                vals.append(mpq_norm_decomp(f, (self.p, self.q))[0])
            else:
                vals.append(mpq_norm_stft(f, (self.p, self.q)))
        return np.array(vals)[:, None]

    def get_feature_names_out(self, input_features=None):
        return np.array([f"m{self.p:g}_{self.q:g}_{self.method}"], dtype=object)


class BandDecomposition(_GridTransformer):
    """Per-band ``L^p`` norms ``||phi(D - k) f||_p`` for ``|k|_inf <= kmax``."""

    def __init__(self, p=2.0, kmax=4, grid_l=16.0, dim=1):
        self.p = p
        self.kmax = kmax
        self.grid_l = grid_l
        self.dim = dim

    def transform(self, X):
        rows = []
        for f in self._rows(X):
            d = decomp_band_norms(f, self.p, kmax=self.kmax)
            rows.append([d.band_norms[k] for k in sorted(d.band_norms)])
        return np.array(rows)

    def get_feature_names_out(self, input_features=None):
        check_is_fitted(self, "grid_")
        r = range(-self.kmax, self.kmax + 1)
        keys = sorted(np.ndindex(*([len(r)] * self.dim)))
        names = ["band_" + "_".join(str(i - self.kmax) for i in key) for key in keys]
        return np.array(names, dtype=object)


__all__ = ["FractionalIntegral", "ModulationNorm", "BandDecomposition"]
