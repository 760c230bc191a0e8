import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import integrate

from modfrac.grid import (
    Field,
    GridSpec,
    apply_multiplier,
    eval_bandlimited,
    forward_ft,
    inverse_ft,
    lp_norm,
    sample,
)
from modfrac.fracint import psi_field
from modfrac.windows import PsiProfile, eval_psi
from modfrac.acceptance import random_bandlimited

G1 = GridSpec(1, 256, 8.0)


def gauss(x):
    return np.exp(-0.5 * np.sum(x * x, axis=-1))


def noise_field(seed, spec=G1):
    rng = np.random.default_rng(seed)
    return Field(spec, rng.normal(size=spec.shape) + 1j * rng.normal(size=spec.shape))


@pytest.mark.parametrize("args", [(3, 64, 1.0), (1, 100, 1.0), (1, 8, 1.0), (1, 64, 0.0), (1, 64, -2.0)])
def test_gridspec_rejects_bad_parameters(args):
    with pytest.raises(ValueError):
        GridSpec(*args)


def test_grid_spacings():
    g = GridSpec(2, 64, 4.0)
    assert g.h == pytest.approx(0.125)
    assert g.dxi == pytest.approx(np.pi / 4)
    assert g.points().shape == (64, 64, 2)
    assert g.axis()[0] == -4.0 and g.axis()[32] == 0.0


def test_constant_profile_samples_ones():
    f = sample(lambda x: np.ones(x.shape[:-1]), G1)
    assert np.all(f.values == 1)


def test_odd_profile_is_antisymmetric():
    f = sample(lambda x: x[..., 0] ** 3, G1)
    v = f.values
    # index 0 (x = -l) has no partner
    assert np.allclose(v[1:], -v[1:][::-1], atol=0, rtol=0)


def test_field_rejects_wrong_size_and_domain():
    with pytest.raises(ValueError):
        Field(G1, np.zeros(10))
    with pytest.raises(ValueError):
        Field(G1, np.zeros(256), "frequency")
    f = noise_field(0)
    with pytest.raises(ValueError):
        inverse_ft(f)
    with pytest.raises(ValueError):
        forward_ft(forward_ft(f))


def test_field_values_are_read_only():
    f = noise_field(1)
    with pytest.raises(ValueError):
        f.values[0] = 1.0


def test_impulse_transforms_to_constant():
    vals = np.zeros(G1.shape)
    vals[G1.m // 2] = 1.0 / G1.h
    F = forward_ft(Field(G1, vals))
    assert np.allclose(F.values, 1.0, atol=1e-14)


def test_constant_spectrum_is_concentrated_at_origin():
    f = inverse_ft(Field(G1, np.ones(G1.shape), "spectral"))
    mag = np.abs(f.values)
    assert np.argmax(mag) == G1.m // 2
    assert np.sum(mag ** 2) == pytest.approx(mag[G1.m // 2] ** 2)


def test_gaussian_forward_transform_closed_form():
    f = sample(gauss, G1)
    xi = G1.axis("spectral")
    expect = np.sqrt(2 * np.pi) * np.exp(-0.5 * xi ** 2)
    assert np.max(np.abs(forward_ft(f).values - expect)) < 1e-8


def test_gaussian_inverse_transform_closed_form():
    F = sample(lambda xi: np.sqrt(2 * np.pi) * gauss(xi), G1, "spectral")
    assert np.max(np.abs(inverse_ft(F).values - np.exp(-0.5 * G1.axis() ** 2))) < 1e-8


def test_two_dimensional_gaussian_transform():
    g = GridSpec(2, 64, 8.0)
    F = forward_ft(sample(gauss, g))
    expect = 2 * np.pi * gauss(g.points("spectral"))
    assert np.max(np.abs(F.values - expect)) < 1e-8


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 2 ** 31))
def test_round_trip(seed):
    f = noise_field(seed)
    back = inverse_ft(forward_ft(f))
    assert np.max(np.abs(back.values - f.values)) <= 1e-12 * np.max(np.abs(f.values))


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 2 ** 31), st.complex_numbers(max_magnitude=10), st.complex_numbers(max_magnitude=10))
def test_inverse_is_linear(seed, a, b):
    rng = np.random.default_rng(seed)
    F = Field(G1, rng.normal(size=256) + 1j * rng.normal(size=256), "spectral")
    H = Field(G1, rng.normal(size=256), "spectral")
    lhs = inverse_ft(a * F + b * H).values
    rhs = a * inverse_ft(F).values + b * inverse_ft(H).values
    scale = 1 + abs(a) + abs(b)
    assert np.max(np.abs(lhs - rhs)) <= 1e-12 * scale * np.max(np.abs(inverse_ft(F).values))


@settings(max_examples=10, deadline=None)
@given(st.integers(0, 2 ** 31))
def test_parseval(seed):
    for f in random_bandlimited(np.random.default_rng(seed), G1, 2):
        lhs = lp_norm(f, 2) ** 2
        rhs = np.sum(np.abs(forward_ft(f).values) ** 2) * G1.dxi / (2 * np.pi)
        assert lhs == pytest.approx(rhs, rel=1e-10)


@pytest.mark.parametrize("shift", [1, 5, -12])
def test_modulation_shifts_spectrum_by_bins(shift):
    f = noise_field(7)
    k = shift * G1.dxi
    g = Field(G1, np.exp(1j * k * G1.axis()) * f.values)
    F, Gs = forward_ft(f).values, forward_ft(g).values
    assert np.max(np.abs(Gs - np.roll(F, shift))) < 1e-12 * np.max(np.abs(F))


def test_lp_norm_zero_and_gaussian():
    assert lp_norm(Field(G1, np.zeros(256)), 3) == 0.0
    f = sample(gauss, GridSpec(1, 1024, 16.0))
    assert lp_norm(f, 2) == pytest.approx(np.pi ** 0.25, abs=1e-8)


@pytest.mark.parametrize("p", [1.0, 0.5, np.inf, np.nan])
def test_lp_norm_rejects_bad_exponent(p):
    with pytest.raises(ValueError):
        lp_norm(noise_field(0), p)


def test_lp_norm_dilation_law():
    g = GridSpec(1, 2048, 32.0)
    lam, p = 0.5, 3.0
    f = sample(gauss, g)
    f_lam = sample(lambda x: gauss(lam * x), g)
    assert lp_norm(f_lam, p) / lp_norm(f, p) == pytest.approx(lam ** (-1 / p), rel=1e-6)


def test_apply_multiplier_identity():
    f = noise_field(3)
    assert np.allclose(apply_multiplier(f, np.ones(G1.shape)).values, f.values, atol=1e-13)


def test_eval_bandlimited_at_origin_matches_integral():
    prof = PsiProfile(1.0)
    mass, _ = integrate.quad(lambda t: eval_psi(t, 1.0), -1, 1, epsabs=1e-14, limit=200)
    assert eval_bandlimited(prof, 0.0).real == pytest.approx(mass / (2 * np.pi), rel=1e-10)


def test_eval_bandlimited_matches_fft_path():
    prof = PsiProfile(1.0)
    g = GridSpec(1, 2048, 1024.0)
    psi = psi_field(prof, g)
    x = g.axis()[::97]
    # bin-aligned nodes reproduce the FFT sum exactly
    on_bins = eval_bandlimited(prof, x, spacing=g.dxi)
    assert np.max(np.abs(on_bins - psi.values[::97])) < 1e-10 * np.abs(psi.values).max()
    # the default node lattice computes the continuum integral; the box is wide enough
    fine = eval_bandlimited(prof, x)
    assert np.max(np.abs(fine - psi.values[::97])) < 1e-10 * np.abs(psi.values).max()


def test_eval_bandlimited_real_even_profile():
    prof = PsiProfile(0.25)
    x = np.linspace(0.1, 40, 17)
    plus, minus = eval_bandlimited(prof, x), eval_bandlimited(prof, -x)
    assert np.max(np.abs(plus.imag)) < 1e-12
    assert np.allclose(plus, minus, atol=1e-15)


def test_eval_bandlimited_two_dimensional_points():
    prof = PsiProfile(1.0)
    pts = np.array([[0.0, 0.0], [1.0, -2.0], [3.5, 0.5]])
    v = eval_bandlimited(prof, pts, n=2, spacing=1 / 64)
    one = eval_bandlimited(prof, pts[:, 0], spacing=1 / 64) * eval_bandlimited(prof, pts[:, 1], spacing=1 / 64)
    # tensor-product profile gives a product transform
    assert np.allclose(v, one, atol=1e-14)
