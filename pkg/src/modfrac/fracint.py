"""Fractional integrals as Fourier multipliers.

``I_alpha`` acts by ``|xi|^{-alpha}`` and ``I_{alpha,beta} = I_alpha + I_beta``.
The band multipliers ``m_k^alpha(xi) = |k|^alpha |xi|^{-alpha} phi(xi - k)``
are uniformly bounded on ``L^p``; their operator norms are estimated here
(exactly for ``p = 2``, as randomized lower bounds otherwise).
"""

from __future__ import annotations

from dataclasses import dataclass, field
import itertools
import math
from typing import Callable, Literal

import numpy as np
from scipy import integrate

from .grid import Field, GridSpec, forward_ft, inverse_ft, _lp
from .windows import DEFAULT_BUMP, BumpWindow, PsiProfile

ZeroBinPolicy = Literal["zero", "cell-average"]


@dataclass(frozen=True)
class MultiplierSpec:
    alpha: float
    beta: float
    policy: ZeroBinPolicy = "cell-average"

    def check(self, n: int) -> None:
        if not 0 < self.beta <= self.alpha < n:
            raise ValueError(
                f"need 0 < beta <= alpha < n, got alpha={self.alpha}, beta={self.beta}, n={n}"
            )
        if self.policy not in ("zero", "cell-average"):
            raise ValueError(f"unknown zero-bin policy {self.policy!r}")


@dataclass(frozen=True)
class OpNormEstimate:
    k: tuple
    p: float
    value: float
    trials: int
    method: Literal["exact-l2", "randomized-lp"]


def gamma_const(alpha: float, n: int) -> float:
    """Normalizing constant ``pi^{n/2} 2^alpha Gamma(alpha/2) / Gamma((n - alpha)/2)``."""
    if not 0 < alpha < n:
        raise ValueError(f"alpha must lie in (0, {n}), got {alpha}")
    return math.pi ** (n / 2) * 2.0 ** alpha * math.gamma(alpha / 2) / math.gamma((n - alpha) / 2)


def cell_average(alpha: float, dxi: float, n: int) -> float:
    """Mean of ``|xi|^{-alpha}`` over the central cell ``[-dxi/2, dxi/2]^n``."""
    a = dxi / 2
    if n == 1:
        return a ** -alpha / (1.0 - alpha)
    # eight congruent triangles in polar coordinates
    val, _ = integrate.quad(lambda t: math.cos(t) ** (alpha - 2.0), 0.0, math.pi / 4,
                            epsabs=0, epsrel=1e-13)
    return 2.0 * a ** -alpha * val / (2.0 - alpha)


def riesz_symbol(spec: GridSpec, alpha: float, policy: ZeroBinPolicy = "cell-average") -> np.ndarray:
    """``|xi|^{-alpha}`` on the spectral bins, zero bin set by ``policy``."""
    xi = spec.points("spectral")
    r = np.sqrt(np.sum(xi * xi, axis=-1))
    zero = r == 0
    out = np.empty_like(r)
    out[~zero] = r[~zero] ** -alpha
    if policy == "zero":
        out[zero] = 0.0
    elif policy == "cell-average":
        out[zero] = cell_average(alpha, spec.dxi, spec.n)
    else:
        raise ValueError(f"unknown zero-bin policy {policy!r}")
    return out


def apply_riesz(f: Field, alpha: float, policy: ZeroBinPolicy = "cell-average") -> Field:
    """``I_alpha f = F^{-1}[|xi|^{-alpha} Ff]``."""
    n = f.spec.n
    if not 0 < alpha < n:
        raise ValueError(f"alpha must lie in (0, {n}), got {alpha}")
    F = forward_ft(f)
    return inverse_ft(Field(f.spec, riesz_symbol(f.spec, alpha, policy) * F.values, "spectral"))


def iab_symbol(spec: GridSpec, ms: MultiplierSpec) -> np.ndarray:
    ms.check(spec.n)
    return riesz_symbol(spec, ms.alpha, ms.policy) + riesz_symbol(spec, ms.beta, ms.policy)


def apply_iab(f: Field, ms: MultiplierSpec) -> Field:
    """``I_{alpha,beta} f = I_alpha f + I_beta f``."""
    ms.check(f.spec.n)
    return apply_riesz(f, ms.alpha, ms.policy) + apply_riesz(f, ms.beta, ms.policy)


def band_multiplier(k, alpha: float, window: BumpWindow = DEFAULT_BUMP,
                    centered: bool = False) -> Callable[[np.ndarray], np.ndarray]:
    """The band multiplier ``m_k^alpha``; ``centered=True`` gives ``xi -> m_k^alpha(xi + k)``.

    Any real ``alpha`` is allowed. The returned callable takes points of shape
    ``(..., n)``.
    """
    k = np.atleast_1d(np.asarray(k, dtype=float))
    if not np.any(k):
        raise ValueError("band multiplier needs k != 0")
    knorm = float(np.linalg.norm(k))

    def mult(xi):
        xi = np.asarray(xi, dtype=float)
        if xi.ndim == 0 or xi.shape[-1] != len(k):
            xi = xi[..., None]
        local = xi if centered else xi - k
        absolute = xi + k if centered else xi
        phi = window(local, len(k))
        out = np.zeros(phi.shape)
        on = phi != 0
        r = np.sqrt(np.sum(absolute[on] ** 2, axis=-1))
        out[on] = (knorm / r) ** alpha * phi[on]
        return out

    return mult


def band_sup_bound(k, alpha: float, n: int, window: BumpWindow = DEFAULT_BUMP) -> float:
    """``(|k| / (|k| - support sqrt(n)))^alpha``, valid for ``alpha >= 0``."""
    kn = float(np.linalg.norm(np.atleast_1d(k)))
    d = window.support * math.sqrt(n)
    if kn <= d:
        raise ValueError("bound needs |k| > support * sqrt(n)")
    return (kn / (kn - d)) ** alpha


# ----------------------------------------------------------------------------
# operator norms

def _ratio(M, G, p, ax):
    g = np.fft.ifftn(G, axes=ax)
    out = np.fft.ifftn(M * G, axes=ax)
    num = np.sum(np.abs(out) ** p, axis=ax)
    den = np.sum(np.abs(g) ** p, axis=ax)
    return (num / den) ** (1.0 / p)


def _trial_start(rng, spec: GridSpec, allowed: np.ndarray, xi: np.ndarray,
                 peak: np.ndarray, kind: int):
    """Initial spectrum for one trial.

    kind 0: packet at the peak of ``|mult|`` (approaches the trivial bound
    ``sup |mult|``); kind 1: packet at a random allowed bin; kind 2: white noise.
    """
    G = np.zeros(spec.shape, dtype=complex)
    if kind == 2:
        nz = int(allowed.sum())
        G[allowed] = rng.standard_normal(nz) + 1j * rng.standard_normal(nz)
        return G
    if kind == 0:
        # near-single-bin packets see |mult(peak)| exactly
        c = peak
        width = spec.dxi * rng.uniform(0.2, 0.35)
    else:
        idx = np.flatnonzero(allowed.reshape(-1))
        c = xi.reshape(-1, spec.n)[rng.choice(idx)]
        width = spec.dxi * rng.uniform(1.0, 8.0)
    x0 = rng.uniform(-spec.l, spec.l, size=spec.n)
    d = xi - c
    G[allowed] = (np.exp(-0.5 * np.sum(d * d, axis=-1) / width ** 2)
                  * np.exp(-1j * xi @ x0))[allowed]
    return G


def opnorm(mult: Callable[[np.ndarray], np.ndarray], p: float, grid: GridSpec,
           trials: int = 8, seed: int = 0, key: tuple = (), steps: int = 40,
           k: tuple = ()) -> OpNormEstimate:
    """Estimate ``||mult(D)||_{L^p -> L^p}`` on the periodic box ``grid``.

    For ``p = 2`` this is the sup of ``|mult|`` over the spectral bins. For other
    ``p`` it is a lower bound: the best ratio ``||mult(D) g||_p / ||g||_p`` over
    ``trials`` random band-limited ``g`` (cycling through wave packets at the
    symbol's peak, packets at random frequencies and white noise), each refined
    by a hill climb. Trial ``i`` draws from a
    generator seeded by ``(seed, *key, i)``, so the estimate is reproducible
    and nondecreasing in ``trials``.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    xi = grid.points("spectral")
    M = np.asarray(mult(xi), dtype=complex)
    if p == 2:
        return OpNormEstimate(tuple(k), p, float(np.abs(M).max()), trials, "exact-l2")
    ax = tuple(range(grid.n))
    Ms = np.fft.ifftshift(M, axes=ax)
    # test functions live on the multiplier's support plus a half-cell margin
    on = np.abs(M) > 0
    if not on.any():
        return OpNormEstimate(tuple(k), p, 0.0, trials, "randomized-lp")
    lo = xi[on].min(axis=0) - 0.5
    hi = xi[on].max(axis=0) + 0.5
    allowed = np.all((xi >= lo) & (xi <= hi), axis=-1)
    peak = xi.reshape(-1, grid.n)[np.argmax(np.abs(M).reshape(-1))]
    best = 0.0
    for i in range(trials):
        rng = np.random.default_rng([seed, *[int(v) & 0xFFFFFFFF for v in key], i])
        G = np.fft.ifftshift(_trial_start(rng, grid, allowed, xi, peak, i % 3), axes=ax)
        allowed_s = np.fft.ifftshift(allowed, axes=ax)
        cur = float(_ratio(Ms, G, p, ax))
        scale = 0.5
        nz = int(allowed_s.sum())
        for _ in range(steps):
            norm = np.sqrt(np.sum(np.abs(G) ** 2) / nz)
            step = np.zeros_like(G)
            step[allowed_s] = (rng.standard_normal(nz) + 1j * rng.standard_normal(nz)) * (scale * norm)
            cand = G + step
            r = float(_ratio(Ms, cand, p, ax))
            if r > cur:
                G, cur = cand, r
            else:
                scale *= 0.85
        best = max(best, cur)
    return OpNormEstimate(tuple(k), p, best, trials, "randomized-lp")


@dataclass
class SweepTable:
    """Operator-norm estimates of ``m_k^alpha`` over a lattice range of ``k``."""

    alpha: float
    p: float
    estimates: list = field(default_factory=list)

    @property
    def max_value(self) -> float:
        return max(e.value for e in self.estimates)

    def by_radius(self) -> dict:
        """Largest estimate at each Euclidean radius ``|k|``."""
        out: dict = {}
        for e in self.estimates:
            r = float(np.linalg.norm(e.k))
            out[r] = max(out.get(r, 0.0), e.value)
        return dict(sorted(out.items()))

    def decreasing_beyond(self, radius: float, tol: float = 1e-12) -> bool:
        vals = [v for r, v in self.by_radius().items() if r >= radius]
        return all(b <= a + tol for a, b in zip(vals, vals[1:]))


SWEEP_GRID = GridSpec(1, 256, 32.0)


def lemma31_sweep(alpha: float, p: float, kmax: int = 64, grid: GridSpec | None = None,
                  trials: int = 8, seed: int = 0, window: BumpWindow = DEFAULT_BUMP,
                  steps: int = 40) -> SweepTable:
    """Operator norms of ``m_k^alpha`` for all ``1 <= |k|_inf <= kmax``.

    Each multiplier is evaluated in its centered form ``m_k^alpha(. + k)`` on a
    small grid; modulation by ``k`` leaves every ``L^p`` operator norm unchanged.
    """
    if kmax < 8:
        raise ValueError("kmax must be >= 8")
    grid = grid or SWEEP_GRID
    table = SweepTable(alpha, p)
    for k in itertools.product(range(-kmax, kmax + 1), repeat=grid.n):
        if max(abs(v) for v in k) == 0:
            continue
        m = band_multiplier(k, alpha, window, centered=True)
        table.estimates.append(opnorm(m, p, grid, trials, seed, key=k, steps=steps, k=k))
    return table


# ----------------------------------------------------------------------------
# band checks

@dataclass
class BandDecayTable:
    ratios: dict = field(default_factory=dict)

    @property
    def max_ratio(self) -> float:
        return max(self.ratios.values()) if self.ratios else 0.0

    def max_in(self, rmin: float, rmax: float) -> float:
        vals = [v for k, v in self.ratios.items() if rmin <= np.linalg.norm(k) <= rmax]
        return max(vals) if vals else 0.0


def band_decay_check(f: Field, ms: MultiplierSpec, p1: float, p2: float,
                     window: BumpWindow = DEFAULT_BUMP, kmax: int = 32,
                     floor: float = 1e-14) -> BandDecayTable:
    """Ratios ``||phi(D-k) I f||_{p2} / (|k|^{-beta} ||psi(D-k) f||_{p1})`` for ``k != 0``.

    ``psi`` is the widened window, equal to 1 on the support of ``phi``.
    Bands whose norms fall below ``floor`` times the largest are skipped.
    """
    if p2 < p1:
        raise ValueError("need p2 >= p1")
    spec = f.spec
    ms.check(spec.n)
    wide = window.widened()
    if kmax + wide.support > spec.nyquist:
        raise ValueError("kmax bands leave the grid's frequency range")
    F = forward_ft(f).values
    xi = spec.points("spectral")
    sym = iab_symbol(spec, ms)
    ax = tuple(range(spec.n))
    cell = spec.cell("spatial")

    def norm_of(mult, p):
        band = np.fft.ifftn(np.fft.ifftshift(mult * F, axes=ax), axes=ax) / cell
        return float(_lp(band, p, cell))

    nums, dens = {}, {}
    for k in itertools.product(range(-kmax, kmax + 1), repeat=spec.n):
        if not any(k):
            continue
        kv = np.array(k, dtype=float)
        dens[k] = norm_of(wide(xi - kv, spec.n), p1)
        nums[k] = norm_of(window(xi - kv, spec.n) * sym, p2)
    top = max(dens.values(), default=0.0)
    table = BandDecayTable()
    for k in dens:
        if top == 0 or dens[k] < floor * top or nums[k] < floor * top:
            continue
        knorm = float(np.linalg.norm(k))
        table.ratios[k] = nums[k] / (knorm ** -ms.beta * dens[k])
    return table


def psi_field(profile: PsiProfile, grid: GridSpec, dilation: float = 1.0) -> Field:
    """Samples of ``Psi(dilation * x)`` where ``Psi = F^{-1} psi``.

    Built spectrally from ``dilation^{-n} psi(xi / dilation)`` on the grid's
    bins: the trapezoid rule with nodes on the bin lattice, i.e. the box
    periodization of ``Psi``.
    """
    xi = grid.points("spectral")
    vals = profile(xi / dilation, grid.n) * dilation ** -grid.n
    return inverse_ft(Field(grid, vals, "spectral"))


def bernstein_check(k, p: float, q: float, profile: PsiProfile = PsiProfile(0.25),
                    grid: GridSpec | None = None) -> float:
    """``||M_k Psi||_q / ||M_k Psi||_p`` with ``M_k Psi(x) = e^{i k.x} Psi(x)``."""
    if q < p:
        raise ValueError("need q >= p")
    grid = grid or GridSpec(1, 1024, 512.0)
    Psi = psi_field(profile, grid)
    k = np.broadcast_to(np.asarray(k, dtype=float), (grid.n,))
    phase = np.exp(1j * grid.points("spatial") @ k)
    g = Field(grid, phase * Psi.values)
    cell = grid.cell("spatial")
    return float(_lp(g.values, q, cell) / _lp(g.values, p, cell))


def modulated_iab_norms(ks, ms: MultiplierSpec, p: float, profile: PsiProfile = PsiProfile(0.25),
                        grid: GridSpec | None = None, batch: int = 512) -> np.ndarray:
    """``||I_{alpha,beta}(M_k Psi)||_{L^p}`` for each lattice point in ``ks``.

    Uses the shifted symbol ``(|xi+k|^{-alpha} + |xi+k|^{-beta}) psi(xi)`` on one
    small grid; ``|I(M_k Psi)|`` is that function's modulus translated, so the
    ``L^p`` norm is unchanged. Requires ``|k|`` beyond the support of ``psi``.
    """
    grid = grid or GridSpec(1, 512, 256.0)
    ms.check(grid.n)
    ks = np.asarray(ks, dtype=float).reshape(-1, grid.n)
    xi = grid.points("spectral").reshape(-1, grid.n)
    psi = profile(xi, grid.n)
    on = psi != 0
    xi_on, psi_on = xi[on], psi[on]
    ax = tuple(range(1, grid.n + 1))
    cell = grid.cell("spatial")
    out = np.empty(len(ks))
    for i in range(0, len(ks), batch):
        kb = ks[i:i + batch]
        r = np.sqrt(np.sum((xi_on[None] + kb[:, None]) ** 2, axis=-1))
        if np.any(r == 0):
            raise ValueError("band overlaps the origin; need |k| outside supp psi")
        spec_vals = np.zeros((len(kb), xi.shape[0]), dtype=complex)
        spec_vals[:, on] = (r ** -ms.alpha + r ** -ms.beta) * psi_on
        spec_vals = spec_vals.reshape((len(kb),) + grid.shape)
        vals = np.fft.ifftn(np.fft.ifftshift(spec_vals, axes=ax), axes=ax) / cell
        out[i:i + batch] = _lp(vals, p, cell, axis=ax)
    return out
