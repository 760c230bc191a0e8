"""Modulation-space norms.

Two evaluators of ``||f||_{M^{p,q}}`` are provided: the mixed ``L^{p,q}``
norm of the Gaussian-window short-time Fourier transform (``x`` inner,
``xi`` outer), and the frequency-uniform decomposition

    ( sum_k || phi(D - k) f ||_{L^p}^q )^{1/q}

with the partition bump ``phi``. The spatial analog of the latter gives the
amalgam norm. The two modulation evaluators agree up to a window dependent
constant, which is measured rather than predicted.
"""

from __future__ import annotations

from dataclasses import dataclass, field
import itertools

import numpy as np

from .grid import Field, GridSpec, forward_ft, inverse_ft, _lp
from .windows import DEFAULT_BUMP, BumpWindow, GaussWindow

#: spectral bins below this fraction of the peak count as empty
BAND_THRESHOLD = 1e-14


@dataclass(frozen=True)
class MixedNormExponents:
    p: float
    q: float

    def __post_init__(self):
        for name, v in (("p", self.p), ("q", self.q)):
            if not (np.isfinite(v) and v > 1):
                raise ValueError(f"{name} must be finite and > 1, got {v}")


def _pq(pq) -> MixedNormExponents:
    if isinstance(pq, MixedNormExponents):
        return pq
    return MixedNormExponents(*pq)


def spectral_band(f: Field, threshold: float = BAND_THRESHOLD, center=None) -> float:
    """Largest ``|xi - center|_inf`` among spectral bins above ``threshold`` of the peak."""
    F = np.abs(forward_ft(f).values if f.domain == "spatial" else f.values)
    peak = F.max()
    if peak == 0:
        return 0.0
    pts = f.spec.points("spectral")
    if center is not None:
        pts = pts - center
    big = F > threshold * peak
    return float(np.abs(pts[big]).max())


@dataclass(frozen=True)
class StftGrid:
    """Sampling of the time-frequency plane for the STFT.

    Frequencies are the spectral bins of ``spec`` with
    ``|xi - xi_center|_inf <= xi_max``; positions are every ``x_stride``-th
    grid point. ``xi_max=None`` picks the band of ``f`` plus a Gaussian tail
    margin sized for ``tail_tol``.
    """

    spec: GridSpec
    xi_max: float | None = None
    xi_center: float | tuple = 0.0
    x_stride: int = 1
    tail_tol: float = 1e-8

    def center(self) -> np.ndarray:
        return np.broadcast_to(np.asarray(self.xi_center, dtype=float), (self.spec.n,))

    def resolve_xi_max(self, f: Field) -> float:
        band = spectral_band(f, center=self.center())
        margin = np.sqrt(-2.0 * np.log(self.tail_tol))
        if self.xi_max is None:
            return min(band + margin, self.spec.nyquist + float(np.abs(self.center()).max()))
        if self.xi_max < band:
            raise ValueError(
                f"frequency window {self.xi_max} is smaller than the band {band:.4g} of f"
            )
        return self.xi_max

    def xi_mask(self, f: Field) -> np.ndarray:
        xi_max = self.resolve_xi_max(f)
        pts = self.spec.points("spectral")
        return np.all(np.abs(pts - self.center()) <= xi_max + 1e-12, axis=-1)

    def n_xi(self, f: Field) -> int:
        """Frequency sample count."""
        return int(self.xi_mask(f).sum())

    def tail_bound(self, f: Field) -> float:
        """Gaussian-tail bound on the relative STFT mass outside the window."""
        d = self.resolve_xi_max(f) - spectral_band(f, center=self.center())
        return float(np.exp(-0.5 * d * d))


def _stft_rows(f: Field, window: GaussWindow, sg: StftGrid, chunk: int = 256):
    """Yield ``(x indices, V rows restricted to the frequency window)``."""
    if f.domain != "spatial":
        raise ValueError("stft expects a spatial field")
    spec = f.spec
    mask = sg.xi_mask(f)
    pts = spec.points("spatial").reshape(-1, spec.n)
    L = 2 * spec.l
    idx = np.arange(spec.m)[::sg.x_stride]
    centers = np.stack(np.meshgrid(*([idx] * spec.n), indexing="ij"), axis=-1).reshape(-1, spec.n)
    ax = tuple(range(1, spec.n + 1))
    fv = f.values
    cell = spec.cell("spatial")
    for i in range(0, len(centers), chunk):
        c = centers[i:i + chunk]
        xc = spec.axis("spatial")[c]  # (chunk, n)
        d = pts[None, :, :] - xc[:, None, :]
        d = (d + spec.l) % L - spec.l  # periodic distance
        w = window(d).reshape((len(c),) + spec.shape)
        prod = np.fft.ifftshift(fv[None] * w, axes=ax)
        V = np.fft.fftshift(np.fft.fftn(prod, axes=ax), axes=ax) * cell
        yield c, V[:, mask]


def stft(f: Field, window: GaussWindow = GaussWindow(), sg: StftGrid | None = None) -> np.ndarray:
    """Short-time Fourier transform ``V f(x_i, xi_j) = int f(t) e^{-i xi_j.t} phi(t - x_i) dt``.

    Returns an array of shape ``(n_positions, n_frequencies)``; positions in
    C order of the strided grid, frequencies in C order of the selected bins.
    """
    sg = sg or StftGrid(f.spec)
    return np.concatenate([V for _, V in _stft_rows(f, window, sg)], axis=0)


def mpq_norm_stft(f: Field, pq, sg: StftGrid | None = None,
                  window: GaussWindow = GaussWindow()) -> float:
    """Discretized ``( int ( int |V f|^p dx )^{q/p} dxi )^{1/q}``."""
    pq = _pq(pq)
    sg = sg or StftGrid(f.spec)
    spec = f.spec
    inner = None
    for _, V in _stft_rows(f, window, sg):
        a = np.abs(V) ** pq.p
        s = a.sum(axis=0)
        inner = s if inner is None else inner + s
    dx = (spec.h * sg.x_stride) ** spec.n
    inner = (inner * dx) ** (pq.q / pq.p)
    return float((inner.sum() * spec.cell("spectral")) ** (1.0 / pq.q))


def _check_band_range(spec: GridSpec, k, window: BumpWindow) -> np.ndarray:
    k = np.broadcast_to(np.asarray(k, dtype=float), (spec.n,))
    if np.any(np.abs(k) + window.support > spec.nyquist + 1e-12):
        raise ValueError(f"band {tuple(k)} leaves the grid's frequency range")
    return k


def band_multiplier_values(spec: GridSpec, k, window: BumpWindow = DEFAULT_BUMP) -> np.ndarray:
    k = _check_band_range(spec, k, window)
    return window(spec.points("spectral") - k, spec.n)


def decomp_band(f: Field, k, window: BumpWindow = DEFAULT_BUMP) -> Field:
    """``phi(D - k) f = F^{-1}[phi(. - k) Ff]``."""
    mult = band_multiplier_values(f.spec, k, window)
    F = forward_ft(f)
    return inverse_ft(Field(f.spec, mult * F.values, "spectral"))


@dataclass
class DecompResult:
    """Per-band ``L^p`` norms of a frequency-uniform decomposition.

    ``tail`` is the relative spectral ``L^2`` mass outside the plateaus of the
    included bands, i.e. what the excluded bands could still see.
    """

    band_norms: dict = field(default_factory=dict)
    kmax: int = 0
    tail: float = 0.0


def default_kmax(f: Field, window: BumpWindow = DEFAULT_BUMP) -> int:
    kmax = int(np.ceil(spectral_band(f))) + 1
    cap = int(np.floor(f.spec.nyquist - window.support + 1e-12))
    return max(0, min(kmax, cap))


def _lattice(kmax: int, n: int):
    return itertools.product(range(-kmax, kmax + 1), repeat=n)


def decomp_band_norms(f: Field, p: float, window: BumpWindow = DEFAULT_BUMP,
                      kmax: int | None = None) -> DecompResult:
    spec = f.spec
    if kmax is None:
        kmax = default_kmax(f, window)
    _check_band_range(spec, kmax, window)
    F = forward_ft(f).values
    xi = spec.points("spectral")
    ax = tuple(range(spec.n))
    cell = spec.cell("spatial")
    norms = {}
    for k in _lattice(kmax, spec.n):
        mult = window(xi - np.array(k, dtype=float), spec.n)
        if not mult.any():
            norms[k] = 0.0
            continue
        band = np.fft.fftshift(np.fft.ifftn(np.fft.ifftshift(mult * F, axes=ax), axes=ax), axes=ax) / cell
        norms[k] = float(_lp(band, p, cell))
    total = np.sum(np.abs(F) ** 2)
    outside = np.any(np.abs(xi) > kmax + 1 - window.support, axis=-1)
    tail = float(np.sqrt(np.sum(np.abs(F[outside]) ** 2) / total)) if total > 0 else 0.0
    return DecompResult(norms, kmax, tail)


def mpq_norm_decomp(f: Field, pq, window: BumpWindow = DEFAULT_BUMP,
                    kmax: int | None = None) -> tuple[float, DecompResult]:
    """Frequency-uniform decomposition norm and its per-band detail."""
    pq = _pq(pq)
    detail = decomp_band_norms(f, pq.p, window, kmax)
    vals = np.array([detail.band_norms[k] for k in sorted(detail.band_norms)])
    return float(np.sum(vals ** pq.q) ** (1.0 / pq.q)), detail


def amalgam_norm(f: Field, pq, window: BumpWindow = DEFAULT_BUMP,
                 kmax: int | None = None) -> float:
    """``( sum_k || phi(. - k) f ||_{L^p}^q )^{1/q}`` over spatial translates."""
    pq = _pq(pq)
    if f.domain != "spatial":
        raise ValueError("amalgam_norm expects a spatial field")
    spec = f.spec
    if kmax is None:
        kmax = int(np.floor(spec.l - window.support))
    x = spec.points("spatial")
    cell = spec.cell("spatial")
    acc = 0.0
    for k in _lattice(kmax, spec.n):
        piece = window(x - np.array(k, dtype=float), spec.n) * f.values
        acc += float(_lp(piece, pq.p, cell)) ** pq.q
    return acc ** (1.0 / pq.q)
