import math
from fractions import Fraction

import numpy as np
import pytest
from scipy import stats

from modfrac.fracint import MultiplierSpec, apply_iab, modulated_iab_norms, psi_field
from modfrac.grid import Field, GridSpec, lp_norm
from modfrac.modnorm import decomp_band_norms
from modfrac.region import RegionQuery, theorem12_verdict
from modfrac.sharpness import (
    CriticalScanConfig,
    DilationScanConfig,
    critical_scan,
    dilation_scan,
    fit_loglog,
    hls_ratio_scan,
    log_series_oracle,
    log_series_tail,
)
from modfrac.windows import PsiProfile


@pytest.fixture(scope="module")
def default_scan():
    return dilation_scan()


@pytest.fixture(scope="module")
def default_critical():
    return critical_scan()


def test_fit_loglog_recovers_power():
    x = np.array([1.0, 2.0, 4.0, 8.0])
    slope, r2 = fit_loglog(x, 3 * x ** -0.7)
    assert slope == pytest.approx(-0.7, abs=1e-12)
    assert r2 == pytest.approx(1.0)


def test_dilation_slopes(default_scan):
    rep = default_scan
    assert len(rep.fitted_rows) >= 4 and rep.dropped == []
    assert rep.slope_in == pytest.approx(-0.5, abs=0.05)
    assert rep.slope_out == pytest.approx(-0.5, abs=0.1)
    assert (rep.predicted_in, rep.predicted_out) == (-0.5, -0.5)
    assert rep.r2_in > 0.999 and rep.r2_out > 0.999


def test_dilation_band_selection(default_scan):
    for row in default_scan.rows:
        assert row["leak_in"] < 1e-10 and row["leak_out"] < 1e-10
        assert row["sample_err"] < 1e-10


def test_dilation_in_norm_is_lp_norm(default_scan):
    row = default_scan.rows[0]
    cfg = DilationScanConfig()
    psi = psi_field(cfg.profile, cfg.grid, row["lam"])
    assert row["in_norm"] == pytest.approx(lp_norm(psi, 2.0), rel=1e-12)


def test_admissible_ratio_bounded():
    rep = dilation_scan(DilationScanConfig(q2=2.5))
    assert rep.ratio_spread() < 1.5


def test_inadmissible_ratio_grows():
    # 1/p2 = 1/3 exceeds 1/p1 - alpha = 1/4: out/in grows like lambda^(-1/12)
    rep = dilation_scan(DilationScanConfig(p2=3.0, q2=2.5))
    assert rep.ratio_growth() > 1.3
    assert rep.slope_out - rep.slope_in == pytest.approx(-1 / 12, abs=0.02)


def test_dilation_refined_grid_slopes_stable(default_scan):
    fine = dilation_scan(DilationScanConfig(grid=GridSpec(1, 2 ** 17, 2.0 ** 15)))
    assert abs(fine.slope_in - default_scan.slope_in) < 0.02
    assert abs(fine.slope_out - default_scan.slope_out) < 0.02


@pytest.mark.parametrize("kw", [
    dict(lambdas=(0.25, 0.125, 0.0625, 0.03125)),
    dict(lambdas=(2 ** -5, 2 ** -4, 2 ** -3, 2 ** -6)),
    dict(lambdas=(2 ** -3, 2 ** -4, 2 ** -5)),
    dict(alpha=0.25, beta=0.5),
    dict(p2=1.0),
    dict(n=2),
])
def test_dilation_config_rejects(kw):
    with pytest.raises(ValueError):
        DilationScanConfig(**kw)


def test_dilation_drops_unresolved_rows():
    # lambda * l = 8 leaves Psi_lambda too wide for the box at the smallest dilation
    lams = (2 ** -3, 2 ** -4, 2 ** -5, 2 ** -6, 2 ** -12)
    rep = dilation_scan(DilationScanConfig(lambdas=lams, grid=GridSpec(1, 2 ** 12, 2.0 ** 9)))
    assert 2 ** -12 in rep.dropped
    assert all(r["lam"] != 2 ** -12 for r in rep.fitted_rows)


def test_log_series_convergent_case():
    partial, integral = log_series_oracle(2.0, 2, 1e4)
    assert 0.25 <= partial / integral <= 4
    assert log_series_tail(2.0, 1e4) < 0.3


def test_log_series_divergent_growth_exponent():
    # increments S(K^2) - S(K) behave like (sqrt 2 - 1)(log K)^(1/2) times a constant
    Ks = np.array([10, 30, 100, 300, 1000], float)
    inc = [log_series_oracle(0.5, 2, K * K)[0] - log_series_oracle(0.5, 2, K)[0] for K in Ks]
    slope = stats.linregress(np.log(np.log(Ks)), np.log(inc)).slope
    assert slope == pytest.approx(0.5, abs=0.1)
    assert math.isinf(log_series_tail(0.5, 1e4))


@pytest.mark.parametrize("N,a", [(2, 2.0), (5, 0.5), (7, 1.0)])
def test_log_series_single_term(N, a):
    partial, _ = log_series_oracle(a, N, N + 1)
    assert partial == pytest.approx(2 * (N + 1) ** -1.0 * math.log(N + 1) ** -a, rel=1e-14)


def test_log_series_two_dimensional_single_shell():
    # radius 5 shell: (+-3, +-4), (+-4, +-3), (+-5, 0), (0, +-5)
    partial, _ = log_series_oracle(1.5, 4.9, 5, n=2)
    assert partial == pytest.approx(12 * 5.0 ** -2 * math.log(5) ** -1.5, rel=1e-14)


def test_log_series_rejects_small_start():
    with pytest.raises(ValueError):
        log_series_oracle(2.0, 1, 10)
    with pytest.raises(ValueError):
        log_series_oracle(2.0, 10, 10)


def test_critical_in_norm_converges(default_critical):
    rep = default_critical
    Ks = [r["K"] for r in rep.rows]
    incs = [rep.in_increment(a, b) for a, b in zip(Ks, Ks[1:])]
    assert all(b < a for a, b in zip(incs, incs[1:]))
    assert rep.in_increment(10000, 20000) < 0.01


def test_critical_out_norm_diverges_like_oracle(default_critical):
    rep = default_critical
    assert rep.out_monotone()
    sums = [r["out_power"] for r in rep.rows]
    assert all(b > a for a, b in zip(sums, sums[1:]))
    assert rep.delta == pytest.approx(0.25)
    ratio = rep.growth_ratio(100, 10000) / rep.oracle_ratio(100, 10000)
    assert abs(ratio - 1) < 0.2
    assert math.isinf(rep.total_bound())


def test_control_run_converges():
    cfg = CriticalScanConfig(q2=Fraction(20, 9), control=True)
    rep = critical_scan(cfg)
    bound = rep.total_bound()
    assert math.isfinite(bound)
    last = rep.rows[-1]["out_power"]
    assert last <= bound < 2 * last


def test_in_norm_matches_closed_form(default_critical):
    # in-norm^q1 = ||Psi||_2^4 * sum |l|^-1 (log|l|)^-(3/2)
    cfg = CriticalScanConfig()
    psi = lp_norm(psi_field(cfg.profile, cfg.grid), 2.0)
    for row in default_critical.rows:
        series, _ = log_series_oracle(1.5, 2, row["K"])
        assert row["in_power"] == pytest.approx(psi ** 4 * series, rel=1e-12)


@pytest.mark.parametrize("kw", [
    dict(eps=0.0),
    dict(eps=1.0),
    dict(q2=Fraction(5, 2)),
    dict(q2=Fraction(2), control=True),
    dict(Ks=(100, 10)),
    dict(Ks=(2, 10)),
])
def test_critical_config_rejects(kw):
    with pytest.raises(ValueError):
        CriticalScanConfig(**kw)


def test_critical_accepts_string_rationals():
    cfg = CriticalScanConfig(alpha="1/4", beta="1/4", q1="4", q2="2")
    assert cfg.floats()["q2"] == 2.0


def test_lacunary_band_selection():
    # integer frequencies on this grid's lattice; the bands of f and I f are one term each
    g = GridSpec(1, 2048, 64 * np.pi)
    prof = PsiProfile(0.25)
    psi = psi_field(prof, g)
    ms = MultiplierSpec(0.25, 0.25)
    ls = [3, -4, 6, 9]
    coef = {l: abs(l) ** -0.25 * math.log(abs(l)) ** -0.375 for l in ls}
    f = Field(g, sum(coef[l] * np.exp(1j * l * g.axis()) * psi.values for l in ls))
    d_in = decomp_band_norms(f, 2.0, kmax=12)
    d_out = decomp_band_norms(apply_iab(f, ms), 4.0, kmax=12)
    shifted = dict(zip(ls, modulated_iab_norms([[l] for l in ls], ms, 4.0, prof, g)))
    top_in, top_out = max(d_in.band_norms.values()), max(d_out.band_norms.values())
    for (k,), v in d_in.band_norms.items():
        if k in coef:
            assert v == pytest.approx(coef[k] * lp_norm(psi, 2.0), rel=1e-10)
            assert d_out.band_norms[(k,)] == pytest.approx(coef[k] * shifted[k], rel=1e-10)
        else:
            assert v < 1e-12 * top_in
            assert d_out.band_norms[(k,)] < 1e-12 * top_out


def test_hls_admissible_ratio_invariant():
    scan = hls_ratio_scan(0.25, 2.0, 4.0)
    assert scan.spread() < 1e-6
    assert all(np.isfinite(scan.ratios)) and scan.ratios[0] > 0
    assert scan.predicted_slope == 0.0


def test_hls_inadmissible_slope():
    scan = hls_ratio_scan(0.25, 2.0, 3.0, strict=False)
    assert scan.predicted_slope == pytest.approx(1 / 12)
    assert scan.slope == pytest.approx(scan.predicted_slope, abs=0.05)


@pytest.mark.parametrize("p,q", [(2.0, 3.0), (2.0, 2.0), (4.0, 2.0)])
def test_hls_rejects_inadmissible(p, q):
    with pytest.raises(ValueError):
        hls_ratio_scan(0.25, p, q)


def test_region_agrees_with_dilation_scan(default_scan):
    good = theorem12_verdict(RegionQuery.from_exponents(1, Fraction(1, 4), Fraction(1, 4), 2, 4, 4, Fraction(5, 2)))
    bad = theorem12_verdict(RegionQuery.from_exponents(1, Fraction(1, 4), Fraction(1, 4), 2, 4, 3, Fraction(5, 2)))
    assert good.bounded and good.p_critical
    assert not bad.bounded
    # out-norm slope minus in-norm slope is zero on the p-line and negative beyond it
    assert abs(default_scan.slope_out - default_scan.slope_in) < 0.01
    worse = dilation_scan(DilationScanConfig(p2=3.0, q2=2.5))
    assert worse.slope_out - worse.slope_in < -0.05


def test_region_agrees_with_critical_scan(default_critical):
    v = theorem12_verdict(RegionQuery.from_exponents(1, Fraction(1, 4), Fraction(1, 4), 2, 4, 4, 2))
    assert not v.bounded and v.q_critical
    assert math.isinf(default_critical.total_bound())
    control = theorem12_verdict(RegionQuery.from_exponents(1, Fraction(1, 4), Fraction(1, 4), 2, 4, 4, Fraction(20, 9)))
    assert control.bounded
