"""Acceptance checks shared by ``clifsig selftest`` and the test suite.

Each criterion returns a list of :class:`CheckResult`; a criterion passes
when all of its checks do. Grids stay at or below 64x64 so the whole run
finishes in seconds.
"""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from importlib import resources
from typing import Callable, Iterable

import numpy as np

from . import algebra as ga
from .analytic import (
    analytic_signal,
    decompose,
    extended_hilbert,
    orientation_field,
    partial_transforms,
    reconstruct,
    reconstruct_from_orientation,
    split_exceptional,
    cosine,
    sine,
)
from .multipliers import (
    NAMED_PARAMETERS,
    MultiplierField,
    ParametricParams,
    SymmetryClass,
    classify,
    idempotent_of,
    is_generic,
    make_hahn,
    make_hypercomplex,
    make_modified_hypercomplex,
    make_monogenic,
    make_parametric,
    make_random_unit,
    make_scalar_set,
    make_sign,
)
from .spectral import E12, E123, FrequencyGrid, MultivectorField, brute_force_ft, forward_ft, inverse_ft

GRID = (32, 32)
RANDOM_SEEDS = (0, 1, 2, 3, 4)
ORIENTATION_SEED = 7
FIXTURE = "orientation_baseline.npz"


@dataclass
class CheckResult:
    check: str
    status: str
    residual: float
    tolerance: float | None

    @property
    def passed(self) -> bool:
        return self.status == "pass"

    def as_dict(self) -> dict:
        return asdict(self)


def _le(name: str, residual: float, tol: float) -> CheckResult:
    residual = float(residual)
    ok = math.isfinite(residual) and residual <= tol
    return CheckResult(name, "pass" if ok else "fail", residual, tol)


def _flag(name: str, ok: bool, residual: float = 0.0) -> CheckResult:
    return CheckResult(name, "pass" if ok else "fail", float(residual), None)


def _hahn(grid: FrequencyGrid, faults: frozenset) -> MultiplierField:
    a = make_hahn(grid)
    if "hahn-sign" in faults:
        values = a.values.replace(-a.values.coeffs)
        a = MultiplierField(a.grid, values, a.kind, a.name, a.exceptional, a.params)
    return a


def half_plane(grid: FrequencyGrid) -> MultiplierField:
    """Odd scalar multiplier: +1 on a half-plane of bins, -1 on its mirror."""
    def pred(w):
        return (w[..., 1] > 0) | ((w[..., 1] == 0) & (w[..., 0] > 0))
    return make_scalar_set(grid, pred, name="scalar-set-halfplane")


def constructors(grid: FrequencyGrid, faults: frozenset = frozenset()) -> dict[str, MultiplierField]:
    out = {
        "hahn": _hahn(grid, faults),
        "hypercomplex": make_hypercomplex(grid),
        "modified-hypercomplex": make_modified_hypercomplex(grid),
        "monogenic": make_monogenic(grid),
    }
    for row, params in NAMED_PARAMETERS.items():
        out[f"parametric[{row}]"] = make_parametric(grid, params)
    for seed in RANDOM_SEEDS:
        out[f"random[{seed}]"] = make_random_unit(grid, seed)
    out["scalar-set"] = make_scalar_set(grid, lambda w: w[..., 0] > 0)
    return out


EXPECTED_CLASS = {
    "hahn": SymmetryClass.GENERALIZED,
    "hypercomplex": SymmetryClass.GENERIC,
    "modified-hypercomplex": SymmetryClass.ORDINARY,
    "monogenic": SymmetryClass.ORDINARY,
    "parametric[monogenic]": SymmetryClass.ORDINARY,
    "parametric[modified-hypercomplex]": SymmetryClass.ORDINARY,
    "parametric[hypercomplex]": SymmetryClass.GENERIC,
    **{f"random[{s}]": SymmetryClass.ORDINARY for s in RANDOM_SEEDS},
    "scalar-set": SymmetryClass.GENERALIZED,
}


def _zero_mean_random(a: MultiplierField, seed: int = 0) -> np.ndarray:
    f = np.random.default_rng(seed).normal(size=a.grid.shape)
    return split_exceptional(f, a)[0]


def _max_abs(x) -> float:
    x = np.asarray(x)
    return float(np.max(np.abs(x))) if x.size else 0.0


def multi_cosine_image(shape=GRID) -> np.ndarray:
    g = FrequencyGrid(shape)
    return (cosine(g, (3, 1)) + 0.7 * cosine(g, (-2, 5)) + 0.4 * cosine(g, (7, 2))
            + 0.25 * sine(g, (1, -6)))


def orientation_outputs(oracle: bool, shape=GRID) -> dict[str, np.ndarray]:
    """Orientation-only reconstructions of the synthetic image."""
    g = FrequencyGrid(shape)
    img = multi_cosine_image(shape)
    out = {}
    for name, a in (("monogenic", make_monogenic(g)), ("random", make_random_unit(g, ORIENTATION_SEED))):
        f = split_exceptional(img, a)[0]
        d = decompose(f, a)
        out[name] = reconstruct_from_orientation(d.vhat, a, oracle=oracle)
    return out


def load_fixture() -> dict[str, np.ndarray]:
    with resources.files("clifsig.data").joinpath(FIXTURE).open("rb") as fh:
        with np.load(fh) as data:
            return {k: data[k] for k in data.files}


# -- criteria ---------------------------------------------------------------

def c01_algebra(faults) -> list[CheckResult]:
    out = []
    rng = np.random.default_rng(11)
    for L in (3, 7):
        one = ga.Multivector.scalar(1.0, L)
        gens = [ga.Multivector.basis_vector(k, L) for k in range(1, L + 1)]
        sq = max(_max_abs((e * e - one).coeffs) for e in gens)
        anti = max(_max_abs((a * b + b * a).coeffs) for i, a in enumerate(gens) for b in gens[i + 1:])
        I = ga.pseudoscalar(L)
        Ilm1 = ga.pseudovector(L)
        out.append(_le(f"L={L} e_k^2 = 1", sq, 0.0))
        out.append(_le(f"L={L} e_j e_k = -e_k e_j", anti, 0.0))
        out.append(_le(f"L={L} I^2 = -1", _max_abs((I * I + one).coeffs), 0.0))
        out.append(_le(f"L={L} I_L I_(L-1) = -e_L", _max_abs((I * Ilm1 + gens[-1]).coeffs), 0.0))
        worst = 0.0
        for _ in range(1000):
            m = ga.Multivector(rng.uniform(-1, 1, 1 << L), L)
            worst = max(worst, _max_abs((I * m - m * I).coeffs))
        out.append(_le(f"L={L} I central (1000 trials)", worst, 1e-12))
    return out


def c02_idempotency(faults) -> list[CheckResult]:
    out = []
    for name, a in constructors(FrequencyGrid(GRID), faults).items():
        out.append(_le(f"{name} a^2 = 1", a.square_residual()[0], 1e-12))
        psi = idempotent_of(a)
        err = np.max(np.abs(psi.product(psi).coeffs - psi.coeffs), axis=-1)
        out.append(_le(f"{name} psi^2 = psi", _max_abs(err[a.regular]), 1e-12))
    return out


def c03_classification(faults) -> list[CheckResult]:
    out = []
    grid = FrequencyGrid(GRID)
    fields = constructors(grid, faults)
    fields["scalar-set-halfplane"] = half_plane(grid)
    expected = dict(EXPECTED_CLASS, **{"scalar-set-halfplane": SymmetryClass.ORDINARY})
    oned = make_sign(FrequencyGrid((32,)))
    fields["scalar-set-1d"] = oned
    expected["scalar-set-1d"] = SymmetryClass.ORDINARY
    for name, a in fields.items():
        got = classify(a)
        out.append(_flag(f"{name} -> {got.value} (expected {expected[name].value})", got is expected[name]))
        if got is SymmetryClass.ORDINARY:
            out.append(_flag(f"{name} ordinary implies generic", is_generic(a)))
    return out


def c04_named_parameters(faults) -> list[CheckResult]:
    out = []
    named = {"monogenic": make_monogenic, "modified-hypercomplex": make_modified_hypercomplex,
             "hypercomplex": make_hypercomplex}
    for shape in (GRID, (16, 24), (9, 7)):
        grid = FrequencyGrid(shape)
        for row, params in NAMED_PARAMETERS.items():
            a, b = make_parametric(grid, params), named[row](grid)
            same = (np.array_equal(a.values.coeffs, b.values.coeffs)
                    and np.array_equal(a.exceptional, b.exceptional))
            out.append(_flag(f"{shape} parametric == {row}", same,
                             _max_abs(a.values.coeffs - b.values.coeffs)))
    return out


def c05_one_dimensional(faults) -> list[CheckResult]:
    out = []
    n = 64
    grid = FrequencyGrid((n,))
    a = make_sign(grid)
    neg = grid.omega[..., 0] < 0
    for k in (1, 5, 17, 31):
        f = cosine(grid, (k,))
        spectrum = forward_ft(analytic_signal(f, a)).coeffs
        rel = _max_abs(spectrum[neg]) / _max_abs(spectrum)
        out.append(_le(f"cos k={k}: negative-frequency content (relative)", rel, 1e-10))
    f = _zero_mean_random(a, 5)
    fH = extended_hilbert(f, a)
    out.append(_le("H1 H1 f = f", _max_abs(extended_hilbert(fH, a).coeffs - MultivectorField.from_scalar(f).coeffs), 1e-10))
    fA = analytic_signal(f, a)
    out.append(_le("f_A = H1[f_A]", _max_abs(extended_hilbert(fA, a).coeffs - fA.coeffs), 1e-10))
    return out


def _bins(a: MultiplierField, count: int, seed: int) -> list[tuple[int, ...]]:
    cand = np.argwhere(a.regular)
    pick = np.random.default_rng(seed).choice(len(cand), size=count, replace=False)
    return [tuple(int(i) for i in cand[p]) for p in pick]


def c06_cosine_law(faults) -> list[CheckResult]:
    out = []
    grid = FrequencyGrid(GRID)
    fields = constructors(grid, faults)
    fields["scalar-set-halfplane"] = half_plane(grid)
    fields["parametric[A=1.5]"] = make_parametric(grid, ParametricParams(A=1.5, A2=0.3, B1=-0.2))
    I3 = ga.pseudoscalar(3)
    for name, a in fields.items():
        ordinary = classify(a) is SymmetryClass.ORDINARY
        worst_law, worst_gen = 0.0, 0.0
        for idx in _bins(a, 10, seed=len(name)):
            w = tuple(int(x) for x in grid.omega[idx])
            nidx = tuple((-i) % n for i, n in zip(idx, grid.shape))
            c, s = cosine(grid, w), sine(grid, w)
            fH = extended_hilbert(c, a).coeffs
            a_p, a_m = a.at(idx), a.at(nidx)
            a_e, a_o = (a_p + a_m) * 0.5, (a_p - a_m) * 0.5
            general = c[..., None] * a_e.coeffs + s[..., None] * (I3 * a_o).coeffs
            worst_gen = max(worst_gen, _max_abs(fH - general))
            if ordinary:
                if a.kind == "scalar":
                    expect = np.zeros(fH.shape)
                    expect[..., E123] = a.m[idx] * s
                else:
                    vhat = np.append(a.v[idx], 0.0)
                    expect = orientation_field(vhat[None, None, :] * s[..., None]).coeffs
                worst_law = max(worst_law, _max_abs(fH - expect))
        if ordinary:
            out.append(_le(f"{name}: f_H = I3 vhat(w_c) sin", worst_law, 1e-9))
        out.append(_le(f"{name}: f_H = a_e cos + I3 a_o sin", worst_gen, 1e-9))
    return out


def c07_toggle(faults) -> list[CheckResult]:
    out = []
    for name, a in constructors(FrequencyGrid(GRID), faults).items():
        f = _zero_mean_random(a, 1)
        rec = reconstruct(extended_hilbert(f, a), a)
        out.append(_le(f"{name}: H[H[f]] = f", _max_abs(rec - f), 1e-8))
    return out


def c08_quadrant(faults) -> list[CheckResult]:
    grid = FrequencyGrid(GRID)
    a = _hahn(grid, faults)
    f = _zero_mean_random(a, 2)
    fA = analytic_signal(f, a)
    spectrum = forward_ft(fA).coeffs
    w = grid.omega
    outside = (w[..., 0] < 0) | (w[..., 1] < 0)
    rel = _max_abs(spectrum[outside]) / _max_abs(spectrum)
    pt = partial_transforms(f)
    expect = np.zeros(fA.coeffs.shape)
    expect[..., 0] = 0.25 * (f + pt.fHT)
    expect[..., E123] = 0.25 * (pt.fH1 + pt.fH2)
    return [
        _le("Hahn f_A spectrum outside closed first quadrant (relative)", rel, 1e-10),
        _le("Hahn f_A = (f + f_HT)/4 + I3 (f_H1 + f_H2)/4", _max_abs(fA.coeffs - expect), 1e-9),
    ]


def c09_named_signals(faults) -> list[CheckResult]:
    grid = FrequencyGrid(GRID)
    out = []
    I3e = [orientation_field(np.broadcast_to(np.eye(3)[k], GRID + (3,))).coeffs for k in range(3)]

    a = make_hypercomplex(grid)
    f = _zero_mean_random(a, 3)
    pt = partial_transforms(f)
    fA = analytic_signal(f, a).coeffs
    expect = np.zeros(fA.shape)
    expect[..., 0] = 0.5 * f
    expect += 0.5 * pt.fH1[..., None] * I3e[0] + 0.5 * pt.fH2[..., None] * I3e[1]
    expect[..., E12] += 0.5 * pt.fHT
    out.append(_le("hypercomplex f_A matches (f, f_H1, f_H2, f_HT)", _max_abs(fA - expect), 1e-9))

    a = make_monogenic(grid)
    f = _zero_mean_random(a, 4)
    pt = partial_transforms(f)
    fA = analytic_signal(f, a).coeffs
    expect = np.zeros(fA.shape)
    expect[..., 0] = 0.5 * f
    expect += 0.5 * pt.fR1[..., None] * I3e[0] + 0.5 * pt.fR2[..., None] * I3e[1]
    out.append(_le("monogenic f_A matches Riesz transforms (f_R1, f_R2)", _max_abs(fA - expect), 1e-9))
    return out


def c10_generic_polar(faults) -> list[CheckResult]:
    grid = FrequencyGrid(GRID)
    fields = {
        "hypercomplex": make_hypercomplex(grid),
        "modified-hypercomplex": make_modified_hypercomplex(grid),
        "monogenic": make_monogenic(grid),
        "random[3]": make_random_unit(grid, 3),
        "scalar-set-halfplane": half_plane(grid),
    }
    out = []
    for name, a in fields.items():
        f = _zero_mean_random(a, 6)
        d = decompose(f, a)
        vanish = d.fH_Re if d.kind == "scalar" else d.W
        out.append(_le(f"{name}: {'fH_Re' if d.kind == 'scalar' else 'W'} vanishes", _max_abs(vanish), 1e-10))
        out.append(_le(f"{name}: R cos(theta)/2 = f/2", _max_abs(0.5 * d.R * np.cos(d.theta) - 0.5 * f), 1e-10))
        out.append(_le(f"{name}: R sin(theta)/2 = |f_H|/2",
                       _max_abs(0.5 * d.R * np.sin(d.theta) - 0.5 * d.hnorm), 1e-10))
        fhat = d.orientation()
        sq = fhat.product(fhat).coeffs.copy()
        sq[..., 0] += 1.0
        out.append(_le(f"{name}: (fhat_H)^2 = -1", _max_abs(sq[d.valid]), 1e-10))
        if d.kind != "scalar":
            sig, kap = d.sigma, d.kappa
            sph = np.stack([np.cos(kap) * np.cos(sig), np.cos(kap) * np.sin(sig), np.sin(kap)], axis=-1)
            out.append(_le(f"{name}: vhat from (sigma, kappa)", _max_abs((sph - d.vhat)[d.valid]), 1e-10))
    return out


def c11_oracle(faults) -> list[CheckResult]:
    worst_f, worst_i = 0.0, 0.0
    for n1 in range(1, 9):
        for n2 in range(1, 9):
            for seed in range(20):
                rng = np.random.default_rng(1000 * n1 + 10 * n2 + seed)
                g = MultivectorField(rng.normal(size=(n1, n2, 8)))
                F = forward_ft(g)
                worst_f = max(worst_f, _max_abs(F.coeffs - brute_force_ft(g, "fwd").coeffs))
                worst_i = max(worst_i, _max_abs(inverse_ft(F).coeffs - brute_force_ft(F, "inv").coeffs))
    return [_le("forward FFT == brute-force sum (grids <= 8x8, 20 seeds)", worst_f, 1e-9),
            _le("inverse FFT == brute-force sum (grids <= 8x8, 20 seeds)", worst_i, 1e-9)]


def c12_orientation(faults) -> list[CheckResult]:
    img = multi_cosine_image()
    got = orientation_outputs(oracle=False)
    fixture = load_fixture()
    out = []
    for name, rec in got.items():
        out.append(_flag(f"{name}: output finite", bool(np.all(np.isfinite(rec)))))
        r = float(np.corrcoef(rec.ravel(), img.ravel())[0, 1])
        out.append(CheckResult(f"{name}: Pearson correlation with original > 0",
                               "pass" if r > 0 else "fail", r, 0.0))
        out.append(_le(f"{name}: matches oracle-generated fixture", _max_abs(rec - fixture[name]), 1e-9))
    return out


CRITERIA: list[tuple[int, str, Callable[[frozenset], list[CheckResult]]]] = [
    (1, "algebra axioms", c01_algebra),
    (2, "idempotency and unitarity", c02_idempotency),
    (3, "classification", c03_classification),
    (4, "parametric reproduction of named constructors", c04_named_parameters),
    (5, "1-D reduction", c05_one_dimensional),
    (6, "cosine law", c06_cosine_law),
    (7, "toggle / reconstruction", c07_toggle),
    (8, "quadrant support", c08_quadrant),
    (9, "named-signal equivalence", c09_named_signals),
    (10, "generic / polar identities", c10_generic_polar),
    (11, "oracle equivalence", c11_oracle),
    (12, "orientation-only reconstruction", c12_orientation),
]


def run_criterion(number: int, faults: Iterable[str] = ()) -> list[CheckResult]:
    for num, _, fn in CRITERIA:
        if num == number:
            return fn(frozenset(faults))
    raise KeyError(number)


def run_all(faults: Iterable[str] = ()) -> dict[int, list[CheckResult]]:
    return {num: fn(frozenset(faults)) for num, _, fn in CRITERIA}
