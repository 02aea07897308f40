"""Extended Hilbert transform, analytic signals and their decompositions."""
from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from .multipliers import (
    MultiplierField,
    SymmetryClass,
    classify,
    make_sign,
)
from .spectral import (
    E12,
    E123,
    PLANES,
    FrequencyGrid,
    MultivectorField,
    brute_force_ft,
    forward_ft,
    inverse_ft,
)

log = logging.getLogger(__name__)

UNIT_TOL = 1e-6


def _as_field(f) -> MultivectorField:
    if isinstance(f, MultivectorField):
        if f.domain != "spatial":
            raise ValueError("expected a spatial field")
        return f
    f = np.asarray(f, dtype=np.float64)
    if f.ndim < 1:
        raise ValueError("signal must have at least one axis")
    return MultivectorField.from_scalar(f)


def _transforms(oracle: bool):
    if oracle:
        return (lambda g: brute_force_ft(g, "fwd")), (lambda G: brute_force_ft(G, "inv"))
    return forward_ft, inverse_ft


def extended_hilbert(f, a: MultiplierField, oracle: bool = False) -> MultivectorField:
    """``F^-1[a(omega) F[f](omega)]`` with the multiplier acting from the left."""
    g = _as_field(f)
    if g.shape != a.grid.shape:
        raise ValueError(f"signal shape {g.shape} does not match multiplier grid {a.grid.shape}")
    a.validate()
    fwd, inv = _transforms(oracle)
    return inv(fwd(g).product(a.values, left=True))


def analytic_signal(f, a: MultiplierField) -> MultivectorField:
    g = _as_field(f)
    return g.scale(0.5) + extended_hilbert(g, a).scale(0.5)


def reconstruct(fH: MultivectorField, a: MultiplierField, oracle: bool = False,
                return_residual: bool = False):
    """Apply the operator again; its scalar part is the original signal.

    The non-scalar remainder measures how far ``H`` is from its own inverse
    on this input and is returned when ``return_residual`` is set.
    """
    out = extended_hilbert(fH, a, oracle=oracle)
    rest = np.abs(out.coeffs[..., 1:]).max() if out.coeffs.size else 0.0
    if rest > 1e-8 * max(1.0, out.max_abs()):
        log.warning("reconstruction has non-scalar remainder %.3e", rest)
    f = out.scalar.copy()
    return (f, float(rest)) if return_residual else f


def split_exceptional(f, a: MultiplierField) -> tuple[np.ndarray, np.ndarray]:
    """Separate ``f`` into content on regular bins and on the multiplier's exceptional bins."""
    g = _as_field(f)
    F = forward_ft(g)
    keep = a.regular[..., None]
    regular = inverse_ft(F.replace(np.where(keep, F.coeffs, 0.0))).scalar
    exceptional = inverse_ft(F.replace(np.where(keep, 0.0, F.coeffs))).scalar
    return regular, exceptional


def hilbert_vector_parts(fH: MultivectorField) -> tuple[np.ndarray, np.ndarray]:
    """Return ``(V, W)`` with ``fH = I_3 V + W`` for vector-kind transforms."""
    c = fH.coeffs
    V = np.stack([s * c[..., p] for b, p, s in PLANES[1:]], axis=-1)
    W = np.stack([c[..., b] for b, p, s in PLANES[1:]], axis=-1)
    return V, W


def orientation_field(vhat: np.ndarray) -> MultivectorField:
    """Multivector field ``I_3 vhat`` for a 3-component vector field."""
    vhat = np.asarray(vhat, dtype=np.float64)
    c = np.zeros(vhat.shape[:-1] + (8,))
    for k, (b, p, s) in enumerate(PLANES[1:]):
        c[..., p] = s * vhat[..., k]
    return MultivectorField(c)


@dataclass(frozen=True, eq=False)
class AnalyticDecomposition:
    f: np.ndarray
    fH: MultivectorField
    fA: MultivectorField
    kind: str
    symmetry: SymmetryClass
    multiplier: str
    fH_Re: np.ndarray | None = None
    fH_Im: np.ndarray | None = None
    V: np.ndarray | None = None
    W: np.ndarray | None = None
    R: np.ndarray | None = None
    theta: np.ndarray | None = None
    hnorm: np.ndarray | None = None
    vhat: np.ndarray | None = None
    valid: np.ndarray | None = None

    @property
    def is_generic(self) -> bool:
        return self.symmetry is not SymmetryClass.GENERALIZED

    @property
    def vnorm(self) -> np.ndarray | None:
        return self.hnorm

    def _vector_angles(self) -> None:
        if self.kind != "vector_pseudovector":
            raise ValueError("orientation and elevation angles need a vector-kind multiplier")
        if self.V is None or not self.is_generic:
            raise ValueError("orientation angles are defined for generic analytic signals only")

    @property
    def sigma(self) -> np.ndarray:
        self._vector_angles()
        return np.where(self.valid, np.arctan2(self.V[..., 1], self.V[..., 0]), 0.0)

    @property
    def kappa(self) -> np.ndarray:
        self._vector_angles()
        return np.where(self.valid, np.arcsin(np.clip(self.vhat[..., 2], -1.0, 1.0)), 0.0)

    @property
    def phase_vector(self) -> np.ndarray:
        if self.vhat is None:
            raise ValueError("phase vector needs a generic vector-kind decomposition")
        return self.theta[..., None] * self.vhat

    def orientation(self) -> MultivectorField:
        """The unit multivector ``fH / ||fH||`` (zero on invalid cells)."""
        if not self.is_generic:
            raise ValueError("orientation is defined for generic analytic signals only")
        if self.kind == "scalar":
            c = np.zeros(self.f.shape + (8,))
            c[..., E123] = np.sign(self.fH_Im)
            return MultivectorField(c)
        return orientation_field(self.vhat)


def decompose(f, a: MultiplierField, symmetry: SymmetryClass | None = None) -> AnalyticDecomposition:
    f = np.asarray(f, dtype=np.float64)
    fH = extended_hilbert(f, a)
    fA = MultivectorField.from_scalar(f).scale(0.5) + fH.scale(0.5)
    symmetry = symmetry or classify(a)
    parts: dict = {}
    if a.kind == "scalar":
        parts["fH_Re"] = fH.scalar.copy()
        parts["fH_Im"] = fH[E123].copy()
        hnorm = np.abs(parts["fH_Im"])
    else:
        V, W = hilbert_vector_parts(fH)
        parts["V"], parts["W"] = V, W
        hnorm = np.linalg.norm(V, axis=-1)

    if symmetry is not SymmetryClass.GENERALIZED:
        R = np.hypot(f, hnorm)
        valid = hnorm > 0
        parts.update(R=R, theta=np.arctan2(hnorm, f), hnorm=hnorm, valid=valid)
        if a.kind != "scalar":
            with np.errstate(invalid="ignore", divide="ignore"):
                vhat = np.where(valid[..., None], parts["V"] / hnorm[..., None], 0.0)
            parts["vhat"] = vhat
    return AnalyticDecomposition(f=f, fH=fH, fA=fA, kind=a.kind, symmetry=symmetry,
                                 multiplier=a.name, **parts)


@dataclass(frozen=True)
class PartialTransforms:
    fH1: np.ndarray
    fH2: np.ndarray
    fHT: np.ndarray
    fR1: np.ndarray
    fR2: np.ndarray


def partial_transforms(f) -> PartialTransforms:
    """Partial/total Hilbert and Riesz transforms of a real 2-D signal.

    Odd multipliers are applied together with ``-I_3`` so the outputs are
    real; the even total-transform multiplier is applied directly. All
    multipliers vanish on DC and Nyquist-line bins.
    """
    f = np.asarray(f, dtype=np.float64)
    if f.ndim != 2:
        raise ValueError("partial transforms need a 2-D signal")
    grid = FrequencyGrid(f.shape)
    w = grid.omega
    keep = ~grid.exceptional_mask
    s1 = np.where(keep, np.sign(w[..., 0]), 0.0)
    s2 = np.where(keep, np.sign(w[..., 1]), 0.0)
    r = np.hypot(w[..., 0], w[..., 1])
    with np.errstate(invalid="ignore", divide="ignore"):
        r1 = np.where(keep & (r > 0), w[..., 0] / r, 0.0)
        r2 = np.where(keep & (r > 0), w[..., 1] / r, 0.0)

    F = forward_ft(MultivectorField.from_scalar(f))
    minus_i = np.zeros(8)
    minus_i[E123] = -1.0

    def apply(m, odd):
        G = F.replace(F.coeffs * m[..., None])
        if odd:
            G = G.product(minus_i, left=True)
        return inverse_ft(G).scalar.copy()

    return PartialTransforms(
        fH1=apply(s1, True),
        fH2=apply(s2, True),
        fHT=apply(s1 * s2, False),
        fR1=apply(r1, True),
        fR2=apply(r2, True),
    )


def reconstruct_from_orientation(vhat: np.ndarray, a: MultiplierField, oracle: bool = False) -> np.ndarray:
    """Scalar part of ``H[I_3 vhat]``: the signal implied by the unit orientation alone.

    Zero vectors mark undefined cells and are allowed.
    """
    vhat = np.asarray(vhat, dtype=np.float64)
    if vhat.shape[-1] != 3:
        raise ValueError("orientation field must have 3 components")
    n = np.linalg.norm(vhat, axis=-1)
    bad = (n > 0) & (np.abs(n - 1.0) > UNIT_TOL)
    if np.any(bad):
        worst = float(np.max(np.abs(n[bad] - 1.0)))
        raise ValueError(f"orientation field is not unit length (worst deviation {worst:.3e})")
    if a.kind != "vector_pseudovector":
        raise ValueError("orientation-only reconstruction needs a vector-kind multiplier")
    return extended_hilbert(orientation_field(vhat), a, oracle=oracle).scalar.copy()


def classical_1d(f) -> AnalyticDecomposition:
    """One-dimensional analytic signal through the sign multiplier."""
    f = np.asarray(f, dtype=np.float64)
    if f.ndim != 1:
        raise ValueError("classical_1d expects a 1-D signal")
    return decompose(f, make_sign(FrequencyGrid(f.shape)))


def cosine(grid: FrequencyGrid, bin_: tuple[int, ...]) -> np.ndarray:
    """``cos(omega_c . x)`` sampled on the grid for an integer bin ``omega_c``."""
    idx = np.meshgrid(*[np.arange(n) for n in grid.shape], indexing="ij")
    phase = sum(2.0 * np.pi * ((k * x) % n) / n for k, x, n in zip(bin_, idx, grid.shape))
    return np.cos(phase)


def sine(grid: FrequencyGrid, bin_: tuple[int, ...]) -> np.ndarray:
    idx = np.meshgrid(*[np.arange(n) for n in grid.shape], indexing="ij")
    phase = sum(2.0 * np.pi * ((k * x) % n) / n for k, x, n in zip(bin_, idx, grid.shape))
    return np.sin(phase)
