"""Windows: the partition bump, the Gaussian STFT window and the test profile.

Points are arrays whose last axis holds the coordinates; a scalar or a flat
array of scalars is read as one-dimensional points.
"""

from __future__ import annotations

from dataclasses import dataclass
import itertools

import numpy as np


def _rho(u: np.ndarray) -> np.ndarray:
    pos = u > 0
    out = np.zeros_like(u)
    out[pos] = np.exp(-1.0 / u[pos])
    return out


def glue(u) -> np.ndarray:
    """C-infinity step ``rho(u) / (rho(u) + rho(1 - u))``, 0 for u <= 0, 1 for u >= 1."""
    u = np.asarray(u, dtype=float)
    a, b = _rho(u), _rho(1.0 - u)
    return a / (a + b)


def _as_points(t, n: int | None) -> np.ndarray:
    t = np.asarray(t, dtype=float)
    if n is None:
        return t[..., None] if t.ndim <= 1 else t
    if n == 1 and (t.ndim == 0 or t.shape[-1] != 1):
        return t[..., None]
    return t


@dataclass(frozen=True)
class BumpWindow:
    """Tensor-product bump: 1 on ``[-plateau, plateau]^n``, 0 off ``[-support, support]^n``.

    The default is the frequency-uniform partition window; ``widened()``
    gives the auxiliary window equal to 1 on the default window's support.
    """

    plateau: float = 0.5
    support: float = 0.75

    def __post_init__(self):
        if not 0 < self.plateau < self.support:
            raise ValueError("need 0 < plateau < support")

    def profile1d(self, t) -> np.ndarray:
        a = np.abs(np.asarray(t, dtype=float))
        return glue((self.support - a) / (self.support - self.plateau))

    def __call__(self, t, n: int | None = None) -> np.ndarray:
        pts = _as_points(t, n)
        return np.prod(self.profile1d(pts), axis=-1)

    def widened(self) -> "BumpWindow":
        r = self.support / self.plateau
        return BumpWindow(self.support, self.support * r)


@dataclass(frozen=True)
class GaussWindow:
    """The Gauss function ``exp(-|t|^2 / 2)``."""

    def __call__(self, t, n: int | None = None) -> np.ndarray:
        pts = _as_points(t, n)
        return np.exp(-0.5 * np.sum(pts * pts, axis=-1))


@dataclass(frozen=True)
class PsiProfile:
    """Smooth profile supported in ``[-s, s]^n`` with ``psi(0) = 1``.

    A rescaled copy of the partition bump: plateau ``2s/3``, support ``s``.
    """

    s: float = 0.25

    def __post_init__(self):
        if not self.s > 0:
            raise ValueError(f"support half-width must be positive, got {self.s}")

    @property
    def bump(self) -> BumpWindow:
        return BumpWindow(2.0 * self.s / 3.0, self.s)

    def __call__(self, t, n: int | None = None) -> np.ndarray:
        return self.bump(t, n)


DEFAULT_BUMP = BumpWindow()


def eval_bump(t, n: int | None = None, window: BumpWindow = DEFAULT_BUMP):
    """Partition bump at a point (scalar for 1-D) or at an array of points."""
    v = window(t, n)
    return float(v) if np.ndim(v) == 0 else v


def eval_psi(t, s: float = 0.25, n: int | None = None):
    v = PsiProfile(s)(t, n)
    return float(v) if np.ndim(v) == 0 else v


def partition_lower_bound(samples: int = 256, n: int = 1,
                          window: BumpWindow = DEFAULT_BUMP) -> float:
    """Minimum of ``sum_k window(xi - k)`` over a sampled unit period.

    Only translates that can reach the period contribute, so the sum over
    ``|k|_inf <= ceil(support) + 1`` is the full lattice sum.
    """
    if samples < 64:
        raise ValueError("need at least 64 samples per axis")
    u = np.arange(samples) / samples
    mesh = np.stack(np.meshgrid(*([u] * n), indexing="ij"), axis=-1)
    reach = int(np.ceil(window.support)) + 1
    total = np.zeros(mesh.shape[:-1])
    for k in itertools.product(range(-reach, reach + 1), repeat=n):
        total += window(mesh - np.array(k, dtype=float), n)
    return float(total.min())
