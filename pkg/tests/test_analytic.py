import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from clifsig.algebra import Multivector
from clifsig.analytic import (
    analytic_signal,
    classical_1d,
    cosine,
    decompose,
    extended_hilbert,
    orientation_field,
    partial_transforms,
    reconstruct,
    reconstruct_from_orientation,
    sine,
    split_exceptional,
)
from clifsig.multipliers import (
    SymmetryClass,
    make_hahn,
    make_hypercomplex,
    make_modified_hypercomplex,
    make_monogenic,
    make_parametric,
    ParametricParams,
    make_random_unit,
    make_scalar_set,
    make_sign,
)
from clifsig.spectral import E12, E123, FrequencyGrid, MultivectorField, forward_ft

G = FrequencyGrid((32, 32))


def blade_field(values, bits):
    """Multivector field ``values * blade``."""
    c = np.zeros(np.shape(values) + (8,))
    c[..., bits] = values
    return MultivectorField(c)


def times(field_values, mv: Multivector):
    """Field ``field_values * mv`` for a constant multivector."""
    return MultivectorField(np.asarray(field_values)[..., None] * mv.coeffs)


def ctor_by_name(name, grid, seed=0):
    return {
        "hahn": make_hahn,
        "hypercomplex": make_hypercomplex,
        "modified-hypercomplex": make_modified_hypercomplex,
        "monogenic": make_monogenic,
        "random": lambda g: make_random_unit(g, seed),
        "scalar-set": lambda g: make_scalar_set(g, lambda w: w[..., 1] > 0),
        "parametric": lambda g: make_parametric(g, ParametricParams(A=1.5, alpha1=0.5, beta2=2.0)),
    }[name](grid)


CTORS = ["hahn", "hypercomplex", "modified-hypercomplex", "monogenic", "random", "scalar-set", "parametric"]


def test_1d_cos_to_sin():
    n, k = 64, 5
    x = np.arange(n)
    f = np.cos(2 * np.pi * k * x / n)
    g = FrequencyGrid((n,))
    fH = extended_hilbert(f, make_sign(g))
    expected = blade_field(np.sin(2 * np.pi * k * x / n), E123)
    assert np.abs(fH.coeffs - expected.coeffs).max() <= 1e-12


def test_1d_analytic_signal_negative_bins_vanish():
    n, k = 64, 5
    x = np.arange(n)
    f = np.cos(2 * np.pi * k * x / n)
    d = classical_1d(f)
    expected = blade_field(0.5 * np.cos(2 * np.pi * k * x / n), 0) + blade_field(0.5 * np.sin(2 * np.pi * k * x / n), E123)
    assert np.abs(d.fA.coeffs - expected.coeffs).max() <= 1e-12
    FA = forward_ft(d.fA)
    neg = FrequencyGrid((n,)).omega[..., 0] < 0
    assert np.abs(FA.coeffs[neg]).max() <= 1e-10 * np.abs(FA.coeffs).max()


def test_zero_in_zero_out():
    for name in CTORS:
        fH = extended_hilbert(np.zeros(G.shape), ctor_by_name(name, G))
        assert fH.max_abs() == 0.0
        assert np.all(reconstruct(fH, ctor_by_name(name, G)) == 0.0)


@pytest.mark.parametrize("name", ["monogenic", "modified-hypercomplex", "random"])
@pytest.mark.parametrize("bin_", [(3, 4), (-5, 2), (1, 11), (7, -7)])
def test_cosine_law_ordinary(name, bin_):
    a = ctor_by_name(name, G)
    idx = tuple(b % n for b, n in zip(bin_, G.shape))
    vhat = np.zeros(3)
    vhat[:2] = a.v[idx]
    fH = extended_hilbert(cosine(G, bin_), a)
    expected = times(sine(G, bin_), Multivector(orientation_field(vhat[None]).coeffs[0]))
    assert np.abs(fH.coeffs - expected.coeffs).max() <= 1e-9


def test_hahn_components_match_partial_transforms():
    a = make_hahn(G)
    f, _ = split_exceptional(np.random.default_rng(4).standard_normal(G.shape), a)
    fA = analytic_signal(f, a)
    p = partial_transforms(f)
    assert np.abs(fA.scalar - 0.25 * (f + p.fHT)).max() <= 1e-9
    assert np.abs(fA[E123] - 0.25 * (p.fH1 + p.fH2)).max() <= 1e-9
    rest = fA.coeffs.copy()
    rest[..., [0, E123]] = 0.0
    assert np.abs(rest).max() <= 1e-12


def test_hahn_spectrum_in_first_quadrant():
    a = make_hahn(G)
    f, _ = split_exceptional(np.random.default_rng(8).standard_normal(G.shape), a)
    FA = forward_ft(analytic_signal(f, a))
    w = G.omega
    outside = ~((w[..., 0] >= 0) & (w[..., 1] >= 0))
    assert np.abs(FA.coeffs[outside]).max() <= 1e-10 * np.abs(FA.coeffs).max()


def test_hypercomplex_components():
    a = make_hypercomplex(G)
    f, _ = split_exceptional(np.random.default_rng(5).standard_normal(G.shape), a)
    p = partial_transforms(f)
    I3 = Multivector.blade(7)
    e1, e2, e12 = Multivector.basis_vector(1), Multivector.basis_vector(2), Multivector.blade(E12)
    expected = (times(0.5 * f, Multivector.scalar(1.0)) + times(0.5 * p.fH1, I3 * e1)
                + times(0.5 * p.fH2, I3 * e2) + times(0.5 * p.fHT, e12))
    assert np.abs(analytic_signal(f, a).coeffs - expected.coeffs).max() <= 1e-9


def test_monogenic_components_are_riesz():
    a = make_monogenic(G)
    f, _ = split_exceptional(np.random.default_rng(6).standard_normal(G.shape), a)
    d = decompose(f, a)
    p = partial_transforms(f)
    assert np.abs(d.V[..., 0] - p.fR1).max() <= 1e-9
    assert np.abs(d.V[..., 1] - p.fR2).max() <= 1e-9
    assert np.abs(d.V[..., 2]).max() <= 1e-12


def test_monogenic_cosine_decomposition():
    bin_ = (3, 4)
    f = cosine(G, bin_)
    d = decompose(f, make_monogenic(G))
    assert d.symmetry is SymmetryClass.ORDINARY
    assert np.abs(d.R - 1.0).max() <= 1e-12
    idx = np.meshgrid(*[np.arange(n) for n in G.shape], indexing="ij")
    phase = 2 * np.pi * np.mod(sum(k * x / n for k, x, n in zip(bin_, idx, G.shape)), 1.0)
    folded = np.where(phase <= np.pi, phase, 2 * np.pi - phase)
    assert np.abs(d.theta - folded).max() <= 1e-9
    v = d.vhat[d.hnorm > 1e-9]
    # sin(phase) < 0 flips the sign of I3 vhat sin, so vhat = +-(0.6, 0.8, 0)
    assert np.allclose(np.abs(v), [0.6, 0.8, 0.0], atol=1e-12)


def test_hypercomplex_elevation_nonzero():
    a = make_hypercomplex(G)
    f, _ = split_exceptional(np.random.default_rng(2).standard_normal(G.shape), a)
    d = decompose(f, a)
    assert d.symmetry is SymmetryClass.GENERIC
    assert np.abs(d.kappa).max() > 0.1
    p = partial_transforms(f)
    hn = d.hnorm
    ok = hn > 1e-9
    assert np.allclose(np.sin(d.kappa[ok]), d.V[..., 2][ok] / hn[ok], atol=1e-10)
    assert np.allclose(np.abs(d.V[..., 2]), np.abs(p.fHT), atol=1e-9)


def test_constant_signal():
    f = np.full(G.shape, 0.7)
    d = decompose(f, make_monogenic(G))
    assert d.fH.max_abs() <= 1e-14
    assert np.abs(d.R - 0.7).max() <= 1e-14
    assert np.all(d.theta == 0.0)
    assert not d.valid.any()
    assert np.all(d.sigma == 0.0) and np.all(d.kappa == 0.0)


def test_scalar_kind_has_no_angles():
    d = decompose(np.random.default_rng(0).standard_normal(G.shape), make_scalar_set(G, lambda w: w[..., 1] > 0))
    with pytest.raises(ValueError):
        d.sigma
    with pytest.raises(ValueError):
        d.kappa


def test_generalized_has_no_polar_fields():
    d = decompose(np.random.default_rng(0).standard_normal(G.shape), make_hahn(G))
    assert d.symmetry is SymmetryClass.GENERALIZED
    assert d.R is None and d.theta is None


def test_reconstruct_monogenic_32():
    a = make_monogenic(G)
    f, _ = split_exceptional(np.random.default_rng(1).standard_normal(G.shape), a)
    assert abs(f.mean()) < 1e-12
    assert np.abs(reconstruct(extended_hilbert(f, a), a) - f).max() <= 1e-8


def test_reconstruct_random_multiplier():
    a = make_random_unit(G, 9)
    f, _ = split_exceptional(np.random.default_rng(1).standard_normal(G.shape), a)
    rec, rest = reconstruct(extended_hilbert(f, a), a, return_residual=True)
    assert np.abs(rec - f).max() <= 1e-8
    assert rest <= 1e-10


def test_partial_transforms_separable_cosine():
    f = cosine(G, (3, 0))
    p = partial_transforms(f)
    assert np.abs(p.fH1 - sine(G, (3, 0))).max() <= 1e-12
    assert np.abs(p.fH2).max() <= 1e-12
    assert np.abs(p.fHT).max() <= 1e-12


def test_partial_transforms_riesz_cosine():
    bin_ = (5, 2)
    p = partial_transforms(cosine(G, bin_))
    r = math.hypot(*bin_)
    assert np.abs(p.fR1 - bin_[0] / r * sine(G, bin_)).max() <= 1e-12
    assert np.abs(p.fR2 - bin_[1] / r * sine(G, bin_)).max() <= 1e-12
    # total transform = H1 H2 on a quadrant-interior bin
    assert np.abs(p.fHT - cosine(G, bin_)).max() <= 1e-12


def test_partial_transforms_total_is_composition():
    f, _ = split_exceptional(np.random.default_rng(3).standard_normal(G.shape), make_hahn(G))
    p = partial_transforms(f)
    p2 = partial_transforms(p.fH2)
    # two odd applications carry (-I3)^2 = -1
    assert np.abs(p2.fH1 + p.fHT).max() <= 1e-9


def test_orientation_only_constant_vector():
    g = FrequencyGrid((8, 8))
    vhat = np.broadcast_to(np.array([0.0, 0.6, 0.8]), g.shape + (3,))
    for oracle in (False, True):
        out = reconstruct_from_orientation(vhat, make_monogenic(g), oracle=oracle)
        assert np.abs(out - out.mean()).max() <= 1e-12


def test_orientation_only_checks():
    g = FrequencyGrid((8, 8))
    with pytest.raises(ValueError):
        reconstruct_from_orientation(np.full(g.shape + (3,), 1.0), make_monogenic(g))
    with pytest.raises(ValueError):
        reconstruct_from_orientation(np.zeros(g.shape + (3,)), make_hahn(g))
    # zero vectors are allowed (undefined cells)
    out = reconstruct_from_orientation(np.zeros(g.shape + (3,)), make_monogenic(g))
    assert np.all(out == 0.0)


def test_orientation_only_positive_correlation():
    from clifsig.verify import multi_cosine_image

    a = make_monogenic(G)
    f, _ = split_exceptional(multi_cosine_image(), a)
    d = decompose(f, a)
    rec = reconstruct_from_orientation(d.vhat, a)
    assert np.all(np.isfinite(rec))
    assert np.corrcoef(rec.ravel(), f.ravel())[0, 1] > 0


def test_shape_mismatch():
    with pytest.raises(ValueError):
        extended_hilbert(np.zeros((8, 8)), make_monogenic(G))


shapes = st.sampled_from([(8, 8), (9, 7), (16, 12), (5, 5)])


@settings(max_examples=40, deadline=None)
@given(st.sampled_from(CTORS), shapes, st.integers(0, 2**16))
def test_toggle(name, shape, seed):
    grid = FrequencyGrid(shape)
    a = ctor_by_name(name, grid, seed)
    f, _ = split_exceptional(np.random.default_rng(seed).standard_normal(shape), a)
    twice = extended_hilbert(extended_hilbert(f, a), a)
    assert np.abs(twice.scalar - f).max() <= 1e-8
    assert np.abs(twice.coeffs[..., 1:]).max() <= 1e-8


@settings(max_examples=40, deadline=None)
@given(st.sampled_from(CTORS), shapes, st.integers(0, 2**16))
def test_analytic_signal_fixed_point(name, shape, seed):
    grid = FrequencyGrid(shape)
    a = ctor_by_name(name, grid, seed)
    f, _ = split_exceptional(np.random.default_rng(seed).standard_normal(shape), a)
    fA = analytic_signal(f, a)
    assert np.abs(extended_hilbert(fA, a).coeffs - fA.coeffs).max() <= 1e-8


@settings(max_examples=30, deadline=None)
@given(st.sampled_from(["hypercomplex", "monogenic", "random", "parametric", "modified-hypercomplex"]),
       shapes, st.integers(0, 2**16))
def test_generic_polar_identities(name, shape, seed):
    grid = FrequencyGrid(shape)
    a = ctor_by_name(name, grid, seed)
    f, _ = split_exceptional(np.random.default_rng(seed).standard_normal(shape), a)
    d = decompose(f, a)
    assert d.is_generic
    assert np.abs(d.W).max() <= 1e-10
    assert np.abs(d.R * np.cos(d.theta) - f).max() <= 1e-10
    assert np.abs(d.R * np.sin(d.theta) - d.hnorm).max() <= 1e-10
    assert np.all((d.theta >= 0) & (d.theta <= np.pi))
    ok = d.valid
    sph = np.stack([np.cos(d.kappa) * np.cos(d.sigma), np.cos(d.kappa) * np.sin(d.sigma), np.sin(d.kappa)], -1)
    assert np.abs(sph[ok] - d.vhat[ok]).max(initial=0.0) <= 1e-10
    o = d.orientation()
    sq = o.product(o).coeffs
    assert np.abs(sq[ok][:, 0] + 1.0).max(initial=0.0) <= 1e-10
    assert np.abs(sq[ok][:, 1:]).max(initial=0.0) <= 1e-10


@settings(max_examples=20, deadline=None)
@given(shapes, st.integers(0, 2**16))
def test_scalar_generic_vanishing(shape, seed):
    grid = FrequencyGrid(shape)
    a = make_scalar_set(grid, lambda w: (w[..., 1] > 0) | ((w[..., 1] == 0) & (w[..., 0] > 0)))
    f, _ = split_exceptional(np.random.default_rng(seed).standard_normal(shape), a)
    d = decompose(f, a)
    assert d.symmetry is SymmetryClass.ORDINARY
    assert np.abs(d.fH_Re).max() <= 1e-10
