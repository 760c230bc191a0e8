"""Desk-scale acceptance suite.

Each check returns a :class:`CheckResult`; ``run_checks`` times them and is
shared by the test suite and the ``selftest`` command.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
import itertools
import math
import time
from typing import Callable

import numpy as np

from .fracint import MultiplierSpec, band_decay_check, lemma31_sweep
from .grid import Field, GridSpec, forward_ft, inverse_ft, lp_norm, sample
from .modnorm import mpq_norm_decomp, mpq_norm_stft
from .region import RegionQuery, theorem12_verdict
from .sharpness import (
    CriticalScanConfig,
    DilationScanConfig,
    critical_scan,
    dilation_scan,
    hls_ratio_scan,
)
from .windows import DEFAULT_BUMP, PsiProfile, partition_lower_bound

FAMILY_GRID = GridSpec(1, 256, 16.0)


@dataclass
class CheckResult:
    number: int
    name: str
    passed: bool
    detail: str
    seconds: float = 0.0

    def line(self) -> str:
        tag = "PASS" if self.passed else "FAIL"
        return f"[{tag}] {self.number:2d} {self.name}: {self.detail} ({self.seconds:.1f}s)"


def random_bandlimited(rng: np.random.Generator, grid: GridSpec = FAMILY_GRID,
                       count: int = 20) -> list[Field]:
    """Sums of one to four modulated, translated bumps of random width.

    Spectra sit inside ``|xi| <= 4.5``, well below the Nyquist frequency of
    the default grid.
    """
    xi = grid.points("spectral")
    out = []
    for _ in range(count):
        spec = np.zeros(grid.shape, dtype=complex)
        for _ in range(int(rng.integers(1, 5))):
            s = rng.uniform(0.5, 1.5)
            c = rng.normal() + 1j * rng.normal()
            x0 = rng.uniform(-4, 4, grid.n)
            k0 = rng.uniform(-3, 3, grid.n)
            spec += c * np.exp(-1j * xi @ x0) * PsiProfile(s)(xi - k0, grid.n)
        out.append(inverse_ft(Field(grid, spec, "spectral")))
    return out


# ----------------------------------------------------------------------------

def check_transforms(seed: int = 0) -> CheckResult:
    g = GridSpec(1, 1024, 16.0)
    f = sample(lambda x: np.exp(-0.5 * x[..., 0] ** 2), g)
    xi = g.axis("spectral")
    ft_err = np.max(np.abs(forward_ft(f).values - np.sqrt(2 * np.pi) * np.exp(-0.5 * xi ** 2)))

    rng = np.random.default_rng(seed)
    pars = 0.0
    for h in random_bandlimited(rng, g, 5):
        lhs = lp_norm(h, 2) ** 2
        rhs = np.sum(np.abs(forward_ft(h).values) ** 2) * g.dxi / (2 * np.pi)
        pars = max(pars, abs(lhs - rhs) / lhs)
    noise = Field(g, rng.normal(size=g.shape) + 1j * rng.normal(size=g.shape))
    back = inverse_ft(forward_ft(noise))
    trip = np.max(np.abs(back.values - noise.values)) / np.max(np.abs(noise.values))
    ok = ft_err < 1e-8 and pars < 1e-10 and trip < 1e-12
    return CheckResult(1, "transform fidelity", ok,
                       f"gauss {ft_err:.2e}, parseval {pars:.2e}, round trip {trip:.2e}")


def check_windows() -> CheckResult:
    t = np.linspace(-1.0, 1.0, 4001)
    v = DEFAULT_BUMP(t, 1)
    plateau = bool(np.all(v[np.abs(t) <= 0.5] == 1.0))
    support = bool(np.all(v[np.abs(t) >= 0.75] == 0.0))
    b1 = partition_lower_bound(256, 1)
    b2 = partition_lower_bound(256, 2)
    ok = plateau and support and b1 >= 1 and b2 >= 1
    return CheckResult(2, "window contract", ok,
                       f"plateau {plateau}, support {support}, partition n=1 {b1:.6f}, n=2 {b2:.6f}")


def check_l2_proportionality(seed: int = 0) -> CheckResult:
    fs = random_bandlimited(np.random.default_rng(seed))
    r = np.array([mpq_norm_stft(f, (2, 2)) / lp_norm(f, 2) for f in fs])
    rsd = float(np.std(r) / np.mean(r))
    return CheckResult(3, "M^{2,2} = L^2 proportionality", rsd < 1e-3,
                       f"ratio {np.mean(r):.10f}, relative std {rsd:.2e}")


EQUIVALENCE_PAIRS = ((2, 2), (2, 4), (4, 2), (3, 3))


def check_norm_equivalence(seed: int = 0) -> CheckResult:
    fs = random_bandlimited(np.random.default_rng(seed + 1))
    ratios = []
    for pq in EQUIVALENCE_PAIRS:
        ratios += [mpq_norm_decomp(f, pq)[0] / mpq_norm_stft(f, pq) for f in fs]
    c1, c2 = min(ratios), max(ratios)
    return CheckResult(4, "decomposition vs STFT equivalence", c2 / c1 < 10,
                       f"band [{c1:.4f}, {c2:.4f}], c2/c1 {c2 / c1:.3f}")


def check_dilation() -> CheckResult:
    base = dilation_scan(DilationScanConfig())
    bad = dilation_scan(DilationScanConfig(p2=2.0))
    ok = (abs(base.slope_in + 0.5) <= 0.05 and abs(base.slope_out - base.predicted_out) <= 0.1
          and len(base.fitted_rows) >= 4 and bad.ratio_growth() >= 2)
    return CheckResult(5, "dilation sharpness", ok,
                       f"slope_in {base.slope_in:.4f}, slope_out {base.slope_out:.4f} "
                       f"(predicted {base.predicted_out:.2f}), p2=2 growth {bad.ratio_growth():.3f}")


def check_band_multipliers(seed: int = 0) -> CheckResult:
    l2 = lemma31_sweep(0.5, 2.0, kmax=64)
    radii = l2.by_radius()
    far = radii[max(radii)]
    l2_ok = l2.max_value <= 2.0 + 0.01 and l2.decreasing_beyond(16) and far < 1.01
    lo = lemma31_sweep(0.5, 4.0, kmax=64, trials=8, seed=seed)
    hi = lemma31_sweep(0.5, 4.0, kmax=64, trials=16, seed=seed)
    change = max(abs(b.value - a.value) / a.value for a, b in zip(lo.estimates, hi.estimates))
    ok = l2_ok and change < 0.05
    return CheckResult(6, "band multiplier uniformity", ok,
                       f"L2 max {l2.max_value:.5f}, |k|=64 {far:.5f}, "
                       f"L4 max {hi.max_value:.5f}, trial-doubling change {change:.2e}")


def band_decay_field(seed: int = 0, grid: GridSpec = GridSpec(1, 2 ** 14, 256.0)) -> Field:
    """Random combination of unit-width bumps centred on every integer up to 70."""
    rng = np.random.default_rng(seed)
    xi = grid.points("spectral")
    prof = PsiProfile(1.0)
    centres = np.arange(-70, 71)
    c = rng.uniform(0.5, 1.0, len(centres)) * np.exp(2j * np.pi * rng.uniform(size=len(centres)))
    spec = sum(ci * prof(xi - k, grid.n) for ci, k in zip(c, centres))
    return inverse_ft(Field(grid, spec, "spectral"))


def check_band_decay(seed: int = 0) -> CheckResult:
    f = band_decay_field(seed)
    ms = MultiplierSpec(0.25, 0.25)
    a = band_decay_check(f, ms, 2.0, 4.0, kmax=32).max_in(2, 32)
    b = band_decay_check(f, ms, 2.0, 4.0, kmax=64).max_in(2, 64)
    change = abs(b - a) / a
    return CheckResult(7, "band decay", change < 0.10,
                       f"max ratio kmax=32 {a:.5f}, kmax=64 {b:.5f}, change {change:.2%}")


CONTROL_Q2 = Fraction(20, 9)  # 1/q2 = 0.45


def check_critical() -> CheckResult:
    rep = critical_scan(CriticalScanConfig())
    sums = [r["out_power"] for r in rep.rows]
    increasing = all(b > a for a, b in zip(sums, sums[1:])) and rep.out_monotone()
    growth = rep.growth_ratio(100, 10000)
    oracle = rep.oracle_ratio(100, 10000)
    match = abs(growth / oracle - 1) < 0.2
    inc = rep.in_increment(10000, 20000)
    ctrl = critical_scan(CriticalScanConfig(q2=CONTROL_Q2, control=True, Ks=(100, 1000, 10000, 20000)))
    bound = ctrl.total_bound()
    crit_bound = rep.total_bound()
    ok = increasing and match and inc < 0.01 and math.isfinite(bound) and not math.isfinite(crit_bound)
    return CheckResult(8, "critical divergence", ok,
                       f"S growth {growth:.4f} vs oracle {oracle:.4f}, in increment {inc:.2%}, "
                       f"control total <= {bound:.4f} (S_K {ctrl.rows[-1]['out_power']:.4f})")


REGION_PAIRS = (
    (1, Fraction(1, 12), Fraction(1, 12)),
    (1, Fraction(1, 4), Fraction(1, 4)),
    (1, Fraction(1, 2), Fraction(1, 4)),
    (1, Fraction(2, 3), Fraction(1, 6)),
    (1, Fraction(5, 6), Fraction(1, 2)),
    (1, Fraction(11, 12), Fraction(11, 12)),
    (2, Fraction(1, 2), Fraction(1, 2)),
    (2, Fraction(3, 2), Fraction(5, 6)),
)


def _reference_bounded(n, a, b, ip1, iq1, ip2, iq2) -> bool:
    # integer form on the common denominator
    d = math.lcm(*(x.denominator for x in (a, b, ip1, iq1, ip2, iq2))) * n
    A, B, P1, Q1, P2, Q2 = (int(x * d) for x in (a, b, ip1, iq1, ip2, iq2))
    return n * P2 <= n * P1 - A and n * Q2 < n * Q1 + B


def check_region() -> CheckResult:
    grid = [Fraction(j, 12) for j in range(1, 12)]
    mismatches = wide_bounded = 0
    on_p = on_q = 0
    for n, a, b in REGION_PAIRS:
        for ip1, iq1, ip2, iq2 in itertools.product(grid, repeat=4):
            v = theorem12_verdict(RegionQuery(n, a, b, ip1, iq1, ip2, iq2))
            if v.bounded != _reference_bounded(n, a, b, ip1, iq1, ip2, iq2):
                mismatches += 1
            if ip1 <= ip2 and iq1 <= iq2 and v.bounded:
                wide_bounded += 1
            on_p += v.p_critical
            on_q += v.q_critical
    ok = mismatches == 0 and wide_bounded == 0 and on_p > 0 and on_q > 0
    return CheckResult(9, "region truth table", ok,
                       f"{len(REGION_PAIRS) * 11 ** 4} queries, {mismatches} mismatches, "
                       f"{wide_bounded} bounded with p1>=p2 and q1>=q2, critical rows p {on_p} q {on_q}")


def check_hls() -> CheckResult:
    adm = hls_ratio_scan(0.25, 2.0, 4.0)
    bad = hls_ratio_scan(0.25, 2.0, 3.0, strict=False)
    ok = adm.spread() < 1e-6 and abs(bad.slope - bad.predicted_slope) <= 0.05
    return CheckResult(10, "HLS scaling", ok,
                       f"admissible spread {adm.spread():.2e}, inadmissible slope {bad.slope:.4f} "
                       f"(predicted {bad.predicted_slope:.4f})")


CHECKS: dict[int, Callable[[], CheckResult]] = {
    1: check_transforms,
    2: check_windows,
    3: check_l2_proportionality,
    4: check_norm_equivalence,
    5: check_dilation,
    6: check_band_multipliers,
    7: check_band_decay,
    8: check_critical,
    9: check_region,
    10: check_hls,
}


def run_check(number: int) -> CheckResult:
    t0 = time.perf_counter()
    res = CHECKS[number]()
    res.seconds = time.perf_counter() - t0
    return res


def run_checks(numbers=None):
    for k in numbers or sorted(CHECKS):
        yield run_check(k)
