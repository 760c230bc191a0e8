"""Necessity experiments for fractional integrals on modulation spaces.

* ``dilation_scan``: norms of ``Psi_lambda = Psi(lambda .)`` and of
  ``I_{alpha,beta} Psi_lambda`` as ``lambda -> 0``; the fitted log-log slopes
  expose the first-index condition ``1/p2 <= 1/p1 - alpha/n``.
* ``critical_scan``: partial sums of the lacunary counterexample
  ``f = sum_{|l|>N} c_l e^{i l.x} Psi`` at the critical second index; the
  input stays bounded while the output grows like a power of ``log K``.
* ``log_series_oracle``: lattice sums ``sum |l|^{-n} (log|l|)^{-a}`` against
  their integral comparator.
* ``hls_ratio_scan``: Hardy-Littlewood-Sobolev ratios under dilation.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
import itertools
import math

import numpy as np
from scipy import integrate, stats

from .fracint import (
    MultiplierSpec,
    apply_iab,
    apply_riesz,
    band_multiplier,
    modulated_iab_norms,
    opnorm,
    psi_field,
)
from .grid import GridSpec, eval_bandlimited, lp_norm
from .modnorm import decomp_band_norms, mpq_norm_decomp
from .windows import DEFAULT_BUMP, BumpWindow, PsiProfile

#: relative size below which a band counts as empty in band-selection checks
BAND_SELECTION_TOL = 1e-12


def fit_loglog(x, y) -> tuple[float, float]:
    """Least-squares slope of ``log y`` against ``log x`` and its ``r^2``."""
    res = stats.linregress(np.log(np.asarray(x, float)), np.log(np.asarray(y, float)))
    return float(res.slope), float(res.rvalue ** 2)


def _check_exponents(n, alpha, beta, *ps):
    if not 0 < beta <= alpha < n:
        raise ValueError(f"need 0 < beta <= alpha < n, got alpha={alpha}, beta={beta}")
    for v in ps:
        if not 1 < v < math.inf:
            raise ValueError(f"exponents must lie in (1, inf), got {v}")


# ----------------------------------------------------------------------------
# dilation scan

DILATION_GRID = GridSpec(1, 2 ** 16, 2.0 ** 15)
MIN_SUPPORT_BINS = 1.0


@dataclass(frozen=True)
class DilationScanConfig:
    n: int = 1
    alpha: float = 0.25
    beta: float = 0.25
    p1: float = 2.0
    q1: float = 4.0
    p2: float = 4.0
    q2: float = 2.0
    lambdas: tuple = tuple(2.0 ** -j for j in range(3, 10))
    grid: GridSpec = DILATION_GRID
    window: BumpWindow = DEFAULT_BUMP
    profile: PsiProfile = PsiProfile(1.0)
    policy: str = "cell-average"

    def __post_init__(self):
        _check_exponents(self.n, self.alpha, self.beta, self.p1, self.q1, self.p2, self.q2)
        if self.grid.n != self.n:
            raise ValueError("grid dimension does not match n")
        lam = list(self.lambdas)
        if len(lam) < 4:
            raise ValueError("need at least 4 dilation values")
        if any(not 0 < v < 0.25 for v in lam):
            raise ValueError("every lambda must lie in (0, 1/4)")
        if lam != sorted(lam, reverse=True):
            raise ValueError("lambdas must be listed in descending order")


@dataclass
class ScanReport:
    """Rows ``(lambda, in-norm, out-norm, leak_in, leak_out, sample_err, bins, ok)`` plus fits."""

    rows: list = field(default_factory=list)
    slope_in: float = math.nan
    slope_out: float = math.nan
    r2_in: float = math.nan
    r2_out: float = math.nan
    predicted_in: float = math.nan
    predicted_out: float = math.nan
    dropped: list = field(default_factory=list)

    @property
    def fitted_rows(self) -> list:
        return [r for r in self.rows if r["ok"]]

    def ratio_spread(self) -> float:
        """max/min over fitted rows of out-norm / in-norm."""
        r = [row["out_norm"] / row["in_norm"] for row in self.fitted_rows]
        return max(r) / min(r)

    def ratio_growth(self) -> float:
        """(out/in at the smallest lambda) / (out/in at the largest)."""
        rows = self.fitted_rows
        return (rows[-1]["out_norm"] / rows[-1]["in_norm"]) / (rows[0]["out_norm"] / rows[0]["in_norm"])


def _leak(detail) -> float:
    centre = detail.band_norms.get((0,) * len(next(iter(detail.band_norms))), 0.0)
    others = max((v for k, v in detail.band_norms.items() if any(k)), default=0.0)
    return others / centre if centre > 0 else math.inf


def dilation_scan(cfg: DilationScanConfig = DilationScanConfig()) -> ScanReport:
    """Dilation experiment on one fixed grid.

    ``Psi_lambda`` is sampled spectrally (see :func:`psi_field`), cross-checked
    pointwise against :func:`eval_bandlimited` with a lattice-aligned node
    spacing, and must occupy only the ``k = 0`` band, as must its image under
    ``I_{alpha,beta}``. Its spectral support must also span at least
    ``MIN_SUPPORT_BINS`` frequency bins. Rows failing a check are excluded
    from the fits.
    """
    ms = MultiplierSpec(cfg.alpha, cfg.beta, cfg.policy)
    grid = cfg.grid
    rep = ScanReport(predicted_in=-cfg.n / cfg.p1, predicted_out=-cfg.n / cfg.p2 - cfg.alpha)
    # a few probe points around the origin, flat C-order indices
    centre = np.linspace(grid.m // 2 - grid.m // 64, grid.m // 2 + grid.m // 64, 5).astype(int)
    probe = centre if grid.n == 1 else centre * grid.m + centre
    x_probe = grid.points("spatial").reshape(-1, grid.n)[probe]
    for lam in cfg.lambdas:
        psi_l = psi_field(cfg.profile, grid, lam)
        direct = eval_bandlimited(cfg.profile, lam * x_probe, cfg.profile.s, grid.n,
                                  spacing=grid.dxi / lam)
        got = psi_l.values.reshape(-1)[probe]
        sample_err = float(np.max(np.abs(direct - got)) / np.abs(psi_l.values).max())

        out = apply_iab(psi_l, ms)
        in_norm, d_in = mpq_norm_decomp(psi_l, (cfg.p1, cfg.q1), cfg.window)
        out_norm, d_out = mpq_norm_decomp(out, (cfg.p2, cfg.q2), cfg.window)
        leak_in, leak_out = _leak(d_in), _leak(d_out)
        # spectral support radius in frequency bins; below one the dilate is not resolved
        bins = lam * cfg.profile.s / grid.dxi
        ok = (leak_in < BAND_SELECTION_TOL and leak_out < BAND_SELECTION_TOL
              and sample_err < 1e-10 and bins >= MIN_SUPPORT_BINS)
        rep.rows.append(dict(lam=lam, in_norm=in_norm, out_norm=out_norm, leak_in=leak_in,
                             leak_out=leak_out, sample_err=sample_err, bins=bins, ok=ok))
        if not ok:
            rep.dropped.append(lam)
    good = rep.fitted_rows
    if len(good) >= 2:
        lam = [r["lam"] for r in good]
        rep.slope_in, rep.r2_in = fit_loglog(lam, [r["in_norm"] for r in good])
        rep.slope_out, rep.r2_out = fit_loglog(lam, [r["out_norm"] for r in good])
    return rep


# ----------------------------------------------------------------------------
# log-series oracle

def _lattice_norms(N: float, K: float, n: int) -> np.ndarray:
    """Euclidean norms of lattice points with ``N < |l| <= K``."""
    if n == 1:
        r = np.arange(math.floor(N) + 1, math.floor(K) + 1, dtype=float)
        r = r[(r > N) & (r <= K)]
        return np.concatenate([r, r])
    kk = int(math.floor(K))
    out = []
    a = np.arange(-kk, kk + 1, dtype=float)
    for i in range(-kk, kk + 1):
        r = np.sqrt(i * i + a * a)
        out.append(r[(r > N) & (r <= K)])
    return np.concatenate(out)


def _sphere_area(n: int) -> float:
    return 2.0 * math.pi ** (n / 2) / math.gamma(n / 2)


def log_series_oracle(a: float, N: float, K: float, n: int = 1,
                      power: float | None = None) -> tuple[float, float]:
    """Lattice sum ``sum_{N<|l|<=K} |l|^{-power} (log|l|)^{-a}`` and its integral comparator.

    ``power`` defaults to ``n``, where the comparator is the closed form
    ``C_n int_{log N}^{log K} t^{-a} dt`` (``C_n`` the unit-sphere area; 2 for
    ``n = 1``). Other powers use ``C_n int_N^K r^{n-1-power} (log r)^{-a} dr``.
    """
    if not K > N >= 2:
        raise ValueError("need K > N >= 2")
    power = n if power is None else power
    r = _lattice_norms(N, K, n)
    partial = float(np.sum(r ** -power * np.log(r) ** -a))
    cn = _sphere_area(n)
    if power == n:
        lo, hi = math.log(N), math.log(K)
        if a == 1:
            integral = cn * (math.log(hi) - math.log(lo))
        else:
            integral = cn * (hi ** (1 - a) - lo ** (1 - a)) / (1 - a)
    else:
        # substitute t = log r
        val, _ = integrate.quad(lambda t: math.exp((n - power) * t) * t ** -a,
                                math.log(N), math.log(K), limit=200)
        integral = cn * val
    return partial, integral


def log_series_tail(a: float, K: float, n: int = 1, power: float | None = None) -> float:
    """``C_n int_K^inf r^{n-1-power} (log r)^{-a} dr``; finite only for convergent series."""
    power = n if power is None else power
    if power < n or (power == n and a <= 1):
        return math.inf
    cn = _sphere_area(n)
    if power == n:
        return cn * math.log(K) ** (1 - a) / (a - 1)
    val, _ = integrate.quad(lambda t: math.exp((n - power) * t) * t ** -a, math.log(K), math.inf)
    return cn * val


# ----------------------------------------------------------------------------
# critical scan

CRITICAL_GRID = GridSpec(1, 512, 256.0)


def choose_N(alpha: float, beta: float, p2: float, n: int = 1, kmax: int = 16,
             grid: GridSpec | None = None, trials: int = 4, seed: int = 0,
             window: BumpWindow = DEFAULT_BUMP) -> int:
    """Smallest ``N >= 2`` with ``C_beta^{-1} N^{-beta} > 2 C_alpha N^{-alpha}``.

    ``C_alpha`` and ``C_beta`` are the largest operator-norm estimates of
    ``m_k^alpha`` and ``m_k^{-beta}`` over ``1 <= |k|_inf <= kmax``. For
    ``p2 != 2`` these are lower bounds, so the resulting ``N`` is heuristic.
    """
    if alpha == beta:
        return 2
    grid = grid or GridSpec(n, 256, 32.0)

    def sup(a):
        best = 0.0
        for k in itertools.product(range(-kmax, kmax + 1), repeat=n):
            if any(k):
                m = band_multiplier(k, a, window, centered=True)
                best = max(best, opnorm(m, p2, grid, trials, seed, key=k, steps=20).value)
        return best

    c_a, c_b = sup(alpha), sup(-beta)
    N = 2
    while not (N ** -beta / c_b > 2 * c_a * N ** -alpha):
        N += 1
    return N


def _frac(v) -> Fraction:
    if isinstance(v, Fraction):
        return v
    if isinstance(v, str):
        return Fraction(v)
    return Fraction(v).limit_denominator(10 ** 6)


@dataclass(frozen=True)
class CriticalScanConfig:
    """Lacunary counterexample parameters.

    Exponents may be given as ``Fraction``, ``"a/b"`` strings or floats;
    the critical relation ``1/q2 = 1/q1 + beta/n`` is checked exactly (floats
    are rationalized first). ``control=True`` instead requires the subcritical
    relation ``1/q2 < 1/q1 + beta/n``.
    """

    n: int = 1
    alpha: object = Fraction(1, 4)
    beta: object = Fraction(1, 4)
    q1: object = Fraction(4)
    q2: object = Fraction(2)
    p1: object = Fraction(2)
    p2: object = Fraction(4)
    eps: float = 0.5
    N: int | None = 2
    Ks: tuple = (10, 100, 1000, 10000, 20000)
    profile: PsiProfile = PsiProfile(0.25)
    grid: GridSpec = CRITICAL_GRID
    policy: str = "cell-average"
    control: bool = False

    def __post_init__(self):
        a, b = _frac(self.alpha), _frac(self.beta)
        q1, q2 = _frac(self.q1), _frac(self.q2)
        _check_exponents(self.n, a, b, q1, q2, _frac(self.p1), _frac(self.p2))
        crit = 1 / q1 + b / self.n
        if not self.control and 1 / q2 != crit:
            raise ValueError(f"not critical: 1/q2 = {1 / q2} but 1/q1 + beta/n = {crit}")
        if self.control and not 1 / q2 < crit:
            raise ValueError("control run needs 1/q2 < 1/q1 + beta/n")
        if not self.eps > 0 or not (1 + self.eps) * float(q2) / float(q1) < 1:
            raise ValueError("need eps > 0 with (1 + eps) q2 / q1 < 1")
        Ks = list(self.Ks)
        if Ks != sorted(Ks) or len(set(Ks)) != len(Ks):
            raise ValueError("K list must be strictly increasing")
        if self.N is not None and Ks[0] <= self.N:
            raise ValueError("every K must exceed N")

    def floats(self) -> dict:
        return {k: float(_frac(getattr(self, k))) for k in ("alpha", "beta", "q1", "q2", "p1", "p2")}


@dataclass
class DivergenceReport:
    """Partial values of the input and output modulation norms.

    ``rows`` hold ``K``, the ``q1``- and ``q2``-th power partial sums and
    their roots (the partial norms), and the oracle values for comparison.
    """

    rows: list = field(default_factory=list)
    N: int = 2
    log_exponent: float = math.nan
    power: float = math.nan
    delta: float = math.nan
    terms_out: np.ndarray | None = None
    certificate_constant: float = math.nan

    def row(self, K) -> dict:
        for r in self.rows:
            if r["K"] == K:
                return r
        raise KeyError(K)

    def growth_ratio(self, K_small, K_big) -> float:
        return self.row(K_big)["out_power"] / self.row(K_small)["out_power"]

    def oracle_ratio(self, K_small, K_big, kind: str = "partial") -> float:
        key = "oracle_partial" if kind == "partial" else "oracle_integral"
        return self.row(K_big)[key] / self.row(K_small)[key]

    def in_increment(self, K_small, K_big) -> float:
        """Relative increase of the input partial norm."""
        a, b = self.row(K_small)["in_norm"], self.row(K_big)["in_norm"]
        return (b - a) / a

    def out_monotone(self) -> bool:
        t = self.terms_out
        return bool(t is not None and np.all(t > 0))

    def total_bound(self, n: int = 1) -> float:
        """Upper bound on the full output series, ``inf`` when the comparator diverges.

        Adds to the last partial sum ``C`` times the integral tail of
        ``sum |l|^{-power} (log|l|)^{-a}``, where ``C`` is the largest observed
        ratio of a term to its comparator. The ratio tends to its limit from
        above (``|k|^beta |xi + k|^{-beta}`` decreases in ``|k|``), so the
        observed maximum covers the unobserved terms.
        """
        last = self.rows[-1]
        tail = log_series_tail(self.log_exponent, last["K"], n, self.power)
        return last["out_power"] + self.certificate_constant * tail


def critical_scan(cfg: CriticalScanConfig = CriticalScanConfig()) -> DivergenceReport:
    """Partial sums of the counterexample's input and output norms.

    By band selection, ``||phi(D-l) f||_{p1} = c_l ||Psi||_{p1}`` and
    ``||phi(D-l) I f||_{p2} = c_l ||I_{alpha,beta}(M_l Psi)||_{p2}``, with
    ``c_l = |l|^{-n/q1} (log|l|)^{-(1+eps)/q1}``. The band norms come from
    :func:`modulated_iab_norms` on one small grid.
    """
    v = cfg.floats()
    n = cfg.n
    N = cfg.N if cfg.N is not None else choose_N(v["alpha"], v["beta"], v["p2"], n)
    if cfg.Ks[0] <= N:
        raise ValueError("every K must exceed N")
    ms = MultiplierSpec(v["alpha"], v["beta"], cfg.policy)
    Kmax = max(cfg.Ks)

    if n == 1:
        ks = np.arange(N + 1, int(Kmax) + 1, dtype=float)
        ks = np.concatenate([ks, -ks])[:, None]
    else:
        kk = int(Kmax)
        a = np.arange(-kk, kk + 1, dtype=float)
        pts = np.stack(np.meshgrid(a, a, indexing="ij"), axis=-1).reshape(-1, 2)
        r = np.linalg.norm(pts, axis=1)
        ks = pts[(r > N) & (r <= Kmax)]
    radii = np.linalg.norm(ks, axis=1)
    order = np.argsort(radii, kind="stable")
    ks, radii = ks[order], radii[order]

    coef = radii ** (-n / v["q1"]) * np.log(radii) ** (-(1 + cfg.eps) / v["q1"])
    psi = psi_field(cfg.profile, cfg.grid)
    psi_norm = lp_norm(psi, v["p1"])
    band_out = modulated_iab_norms(ks, ms, v["p2"], cfg.profile, cfg.grid)
    terms_in = (coef * psi_norm) ** v["q1"]
    terms_out = (coef * band_out) ** v["q2"]
    cum_in, cum_out = np.cumsum(terms_in), np.cumsum(terms_out)

    a_log = (1 + cfg.eps) * v["q2"] / v["q1"]
    power = v["q2"] * (n / v["q1"] + v["beta"])
    comparator = radii ** -power * np.log(radii) ** -a_log
    rep = DivergenceReport(N=N, log_exponent=a_log, power=power, delta=1 - a_log,
                           terms_out=terms_out,
                           certificate_constant=float(np.max(terms_out / comparator)))
    for K in cfg.Ks:
        i = int(np.searchsorted(radii, K, side="right")) - 1
        s_in, s_out = float(cum_in[i]), float(cum_out[i])
        o_part, o_int = log_series_oracle(a_log, N, K, n, power)
        rep.rows.append(dict(K=K, in_power=s_in, out_power=s_out,
                             in_norm=s_in ** (1 / v["q1"]), out_norm=s_out ** (1 / v["q2"]),
                             oracle_partial=o_part, oracle_integral=o_int))
    return rep


# ----------------------------------------------------------------------------
# Hardy-Littlewood-Sobolev ratios

HLS_GRID = GridSpec(1, 2 ** 12, 1024.0)


@dataclass
class HLSScan:
    lambdas: list
    ratios: list
    slope: float
    predicted_slope: float

    def spread(self) -> float:
        return max(self.ratios) / min(self.ratios) - 1.0


def hls_ratio_scan(alpha: float, p: float, q: float, dilations=(0.5, 0.25, 0.125),
                   n: int = 1, profile: PsiProfile = PsiProfile(1.0),
                   grid: GridSpec | None = None, strict: bool = True,
                   policy: str = "cell-average") -> HLSScan:
    """Ratios ``||I_alpha f_lambda||_q / ||f_lambda||_p`` for ``f = Psi``.

    Each dilate is sampled on the base grid scaled by ``1/lambda`` so every
    ``f_lambda`` sees the same relative resolution. ``slope`` is fitted against
    ``log(1/lambda)`` and predicted as ``n (1/q - 1/p + alpha/n)``, which
    vanishes exactly on the admissible line. ``strict=False`` admits inadmissible
    ``q`` to observe that slope.
    """
    ip, iq = Fraction(1, 1) / _frac(p), Fraction(1, 1) / _frac(q)
    if strict:
        from .region import hls_admissible
        if not hls_admissible(ip, iq, _frac(alpha), n):
            raise ValueError("(p, q, alpha) is not HLS admissible")
    grid = grid or (HLS_GRID if n == 1 else GridSpec(2, 256, 128.0))
    ratios = []
    for lam in dilations:
        g = grid.scaled(1.0 / lam)
        f = psi_field(profile, g, lam)
        ratios.append(lp_norm(apply_riesz(f, alpha, policy), q) / lp_norm(f, p))
    inv = [1.0 / lam for lam in dilations]
    slope = fit_loglog(inv, ratios)[0] if len(dilations) > 1 else 0.0
    return HLSScan(list(dilations), [float(r) for r in ratios], slope, n / q - n / p + alpha)
