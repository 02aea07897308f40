"""Fourier multipliers a(omega) with a^2 = 1 and their idempotents (1 + a)/2.

Two families are built: scalar multipliers ``m(omega) = +-1`` and
vector + pseudovector multipliers ``v(omega) + P(omega) I_2``. Bins where a
sign or direction is undefined (DC, Nyquist lines, and axis bins for
sign-based constructions) are *exceptional*: scalar multipliers take the
value 1 there, vector multipliers the value 0, and those bins are exempt
from the ``a^2 = 1`` contract.
"""
from __future__ import annotations

import csv
import enum
import math
from dataclasses import dataclass, field
from typing import Callable, Literal

import numpy as np

from .algebra import Multivector, algebra_table
from .spectral import E1, E2, E12, FrequencyGrid, MultivectorField, PIPELINE_DIM

Kind = Literal["scalar", "vector_pseudovector"]

VALIDATION_TOL = 1e-12
CLASSIFY_TOL = 1e-12


class MultiplierError(ValueError):
    pass


class SymmetryClass(enum.Enum):
    GENERALIZED = "generalized"
    GENERIC = "generic"
    ORDINARY = "ordinary"

    def __str__(self):
        return self.value


@dataclass(frozen=True, eq=False)
class MultiplierField:
    grid: FrequencyGrid
    values: MultivectorField
    kind: Kind
    name: str
    exceptional: np.ndarray
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.values.domain != "frequency" or self.values.shape != self.grid.shape:
            raise MultiplierError("multiplier values must be a frequency field on the grid")
        exc = np.asarray(self.exceptional, dtype=bool).copy()
        exc.setflags(write=False)
        object.__setattr__(self, "exceptional", exc)

    @property
    def regular(self) -> np.ndarray:
        """Bins outside the exceptional set whose negation is also regular."""
        return ~(self.exceptional | self.grid.negate(self.exceptional))

    @property
    def m(self) -> np.ndarray:
        return self.values.scalar

    @property
    def v(self) -> np.ndarray:
        """Vector part ``(..., N)`` with components along e1..eN."""
        return np.stack([self.values[1 << k] for k in range(self.grid.ndim)], axis=-1)

    @property
    def P(self) -> np.ndarray:
        return self.values[(1 << (self.values.dim - 1)) - 1]

    def at(self, index: tuple[int, ...]) -> Multivector:
        return Multivector(self.values.coeffs[index], self.values.dim)

    def square_residual(self) -> tuple[float, tuple[int, ...]]:
        """Worst ``|a^2 - 1|`` coefficient over regular bins and where it occurs."""
        sq = self.values.product(self.values).coeffs.copy()
        sq[..., 0] -= 1.0
        err = np.max(np.abs(sq), axis=-1)
        err = np.where(self.regular, err, 0.0)
        worst = np.unravel_index(int(np.argmax(err)), err.shape)
        return float(err[worst]), tuple(int(i) for i in worst)

    def validate(self, tol: float = VALIDATION_TOL) -> "MultiplierField":
        residual, worst = self.square_residual()
        if residual > tol:
            omega = tuple(int(w) for w in self.grid.omega[worst])
            raise MultiplierError(
                f"{self.name}: a^2 != 1 at bin {worst} (omega={omega}), residual {residual:.3e}"
            )
        table = algebra_table(self.values.dim)
        c = self.values.coeffs
        if self.kind == "scalar":
            stray = np.max(np.abs(c[..., 1:])) if c.size else 0.0
        else:
            allowed = (table.grades == 1) | (np.arange(c.shape[-1]) == (1 << (self.values.dim - 1)) - 1)
            stray = np.max(np.abs(c[..., ~allowed]))
            vnorm = np.linalg.norm(self.v, axis=-1)
            if np.any(vnorm[self.regular] < 1.0 - tol):
                raise MultiplierError(f"{self.name}: vector part shorter than 1 on a regular bin")
        if stray > 0:
            raise MultiplierError(f"{self.name}: blades outside the {self.kind} family are nonzero")
        return self


def _signs(grid: FrequencyGrid) -> tuple[np.ndarray, np.ndarray]:
    w = grid.omega
    return np.sign(w[..., 0]), np.sign(w[..., 1])


def _require_2d(grid: FrequencyGrid) -> None:
    if grid.ndim != 2:
        raise MultiplierError(f"constructor requires a 2-D grid, got shape {grid.shape}")


def _unit(v1: np.ndarray, v2: np.ndarray, scale: float = 1.0) -> tuple[np.ndarray, np.ndarray]:
    norm = np.hypot(v1, v2)
    with np.errstate(invalid="ignore", divide="ignore"):
        u1 = np.where(norm > 0, (scale * v1) / norm, 0.0)
        u2 = np.where(norm > 0, (scale * v2) / norm, 0.0)
    return u1, u2


def _scalar_field(grid: FrequencyGrid, m: np.ndarray, exc: np.ndarray, name: str, **params) -> MultiplierField:
    m = np.where(exc, 1.0, m)
    values = MultivectorField.from_scalar(m, "frequency")
    return MultiplierField(grid, values, "scalar", name, exc, params).validate()


def _vector_field(grid, v1, v2, P, exc, name, **params) -> MultiplierField:
    c = np.zeros(grid.shape + (1 << PIPELINE_DIM,))
    c[..., E1] = np.where(exc, 0.0, v1)
    c[..., E2] = np.where(exc, 0.0, v2)
    c[..., E12] = np.where(exc, 0.0, P)
    values = MultivectorField(c, "frequency")
    return MultiplierField(grid, values, "vector_pseudovector", name, exc, params).validate()


def idempotent_of(a: MultiplierField) -> MultivectorField:
    a.validate()
    c = 0.5 * a.values.coeffs
    c[..., 0] += 0.5
    return a.values.replace(c)


def make_scalar_set(grid: FrequencyGrid, predicate: Callable[[np.ndarray], np.ndarray] | np.ndarray,
                    name: str = "scalar-set") -> MultiplierField:
    """``a = 1`` on the set selected by ``predicate`` (called with ``grid.omega``), ``-1`` elsewhere."""
    mask = predicate(grid.omega) if callable(predicate) else predicate
    mask = np.broadcast_to(np.asarray(mask, dtype=bool), grid.shape)
    return _scalar_field(grid, np.where(mask, 1.0, -1.0), grid.exceptional_mask, name)


def make_sign(grid: FrequencyGrid) -> MultiplierField:
    """Classical sign multiplier: the scalar set ``{omega_1 > 0}``."""
    return make_scalar_set(grid, lambda w: w[..., 0] > 0, name="scalar-set-1d")


def make_hahn(grid: FrequencyGrid) -> MultiplierField:
    _require_2d(grid)
    s1, s2 = _signs(grid)
    m = (s1 + s2 + s1 * s2 - 1.0) / 2.0
    exc = grid.exceptional_mask | (s1 == 0) | (s2 == 0)
    return _scalar_field(grid, m, exc, "hahn")


def make_hypercomplex(grid: FrequencyGrid) -> MultiplierField:
    _require_2d(grid)
    s1, s2 = _signs(grid)
    exc = grid.exceptional_mask | (s1 == 0) | (s2 == 0)
    return _vector_field(grid, s1, s2, s1 * s2, exc, "hypercomplex")


def make_modified_hypercomplex(grid: FrequencyGrid) -> MultiplierField:
    _require_2d(grid)
    s1, s2 = _signs(grid)
    exc = grid.exceptional_mask | (s1 == 0) | (s2 == 0)
    v1, v2 = _unit(s1, s2)
    return _vector_field(grid, v1, v2, 0.0, exc, "modified-hypercomplex")


def make_monogenic(grid: FrequencyGrid) -> MultiplierField:
    _require_2d(grid)
    w = grid.omega
    r = np.hypot(w[..., 0], w[..., 1])
    with np.errstate(invalid="ignore", divide="ignore"):
        v1, v2 = _unit(np.where(r > 0, w[..., 0] / r, 0.0), np.where(r > 0, w[..., 1] / r, 0.0))
    return _vector_field(grid, v1, v2, 0.0, grid.exceptional_mask, "monogenic")


@dataclass(frozen=True)
class ParametricParams:
    """Vector-field model ``v_G = A * (v1, v2)/|(v1, v2)|`` with power-law components."""

    A: float = 1.0
    A1: float = 1.0
    A2: float = 0.0
    B1: float = 0.0
    B2: float = 1.0
    alpha1: float = 1.0
    alpha2: float = 1.0
    beta1: float = 1.0
    beta2: float = 1.0
    s_rule: Literal["+1", "-1", "sgn"] = "+1"

    def as_dict(self) -> dict:
        return {k: getattr(self, k) for k in self.__dataclass_fields__}


NAMED_PARAMETERS = {
    "monogenic": ParametricParams(A=1.0, A1=1.0, A2=0.0, B1=0.0, B2=1.0, alpha1=1.0, beta2=1.0),
    "modified-hypercomplex": ParametricParams(A=1.0, A1=1.0, A2=0.0, B1=0.0, B2=1.0, alpha1=0.0, beta2=0.0),
    "hypercomplex": ParametricParams(A=math.sqrt(2.0), A1=1.0, A2=0.0, B1=0.0, B2=1.0,
                                     alpha1=0.0, beta2=0.0, s_rule="sgn"),
}


def make_parametric(grid: FrequencyGrid, params: ParametricParams | None = None) -> MultiplierField:
    _require_2d(grid)
    p = params or ParametricParams()
    if not p.A >= 1.0:
        raise MultiplierError(f"A must be >= 1 for a real pseudovector part, got {p.A}")
    exps = (p.alpha1, p.alpha2, p.beta1, p.beta2)
    if any(not e >= 0 for e in exps):
        raise MultiplierError(f"exponents must be non-negative, got {exps}")
    if p.s_rule not in ("+1", "-1", "sgn"):
        raise MultiplierError(f"unknown s-rule {p.s_rule!r}")

    w = grid.omega
    s1, s2 = _signs(grid)
    r = np.hypot(w[..., 0], w[..., 1])
    with np.errstate(invalid="ignore", divide="ignore"):
        q1 = np.where(r > 0, np.abs(w[..., 0]) / r, 0.0)
        q2 = np.where(r > 0, np.abs(w[..., 1]) / r, 0.0)
    v1 = p.A1 * s1 * q1 ** p.alpha1 + p.B1 * s2 * q2 ** p.beta1
    v2 = p.A2 * s1 * q1 ** p.alpha2 + p.B2 * s2 * q2 ** p.beta2

    exc = grid.exceptional_mask | (r == 0)
    # A bare sign (exponent 0) is undefined on its axis.
    for coef, expo, s in ((p.A1, p.alpha1, s1), (p.B1, p.beta1, s2), (p.A2, p.alpha2, s1), (p.B2, p.beta2, s2)):
        if coef != 0 and expo == 0:
            exc = exc | (s == 0)
    if p.s_rule == "sgn" and p.A != 1.0:
        exc = exc | (s1 == 0) | (s2 == 0)
    exc = exc | (np.hypot(v1, v2) == 0)

    u1, u2 = _unit(v1, v2, p.A)
    s = {"+1": 1.0, "-1": -1.0}.get(p.s_rule)
    if s is None:
        s = s1 * s2
    P = s * math.sqrt((p.A - 1.0) * (p.A + 1.0))
    return _vector_field(grid, u1, u2, P, exc, "parametric", **p.as_dict())


def make_random_unit(grid: FrequencyGrid, seed: int) -> MultiplierField:
    """Random unit vector per bin pair with ``v(-omega) = -v(omega)`` and ``P = 0``."""
    _require_2d(grid)
    w = grid.omega
    exc = grid.exceptional_mask
    primary = ((w[..., 1] > 0) | ((w[..., 1] == 0) & (w[..., 0] > 0))) & ~exc
    phi = np.random.default_rng(seed).uniform(0.0, 2.0 * np.pi, size=grid.shape)
    c, s = np.where(primary, np.cos(phi), 0.0), np.where(primary, np.sin(phi), 0.0)
    v1 = c - grid.negate(c)
    v2 = s - grid.negate(s)
    return _vector_field(grid, v1, v2, 0.0, exc, "random", seed=int(seed))


def symmetry_residuals(a: MultiplierField) -> dict[str, float]:
    """Max even/odd-part magnitudes of m, v and P over regular bins."""
    reg = a.regular
    neg = a.grid.negate

    def part(x, odd):
        y = 0.5 * (x - neg(x)) if odd else 0.5 * (x + neg(x))
        if y.ndim > reg.ndim:
            y = np.linalg.norm(y, axis=-1)
        return float(np.max(np.abs(np.where(reg, y, 0.0))))

    if a.kind == "scalar":
        return {"m_even": part(a.m, False)}
    vnorm = np.linalg.norm(a.v, axis=-1)
    return {
        "v_even": part(a.v, False),
        "P_odd": part(a.P, True),
        "P_abs": float(np.max(np.abs(np.where(reg, a.P, 0.0)))),
        "v_unit": float(np.max(np.abs(np.where(reg, vnorm - 1.0, 0.0)))),
    }


def is_generic(a: MultiplierField, tol: float = CLASSIFY_TOL) -> bool:
    r = symmetry_residuals(a)
    if a.kind == "scalar":
        return r["m_even"] <= tol
    return r["v_even"] <= tol and r["P_odd"] <= tol


def is_ordinary(a: MultiplierField, tol: float = CLASSIFY_TOL) -> bool:
    if not is_generic(a, tol):
        return False
    if a.kind == "scalar":
        return True
    r = symmetry_residuals(a)
    return r["P_abs"] <= tol and r["v_unit"] <= tol


def classify(a: MultiplierField, tol: float = CLASSIFY_TOL) -> SymmetryClass:
    if is_ordinary(a, tol):
        return SymmetryClass.ORDINARY
    if is_generic(a, tol):
        return SymmetryClass.GENERIC
    return SymmetryClass.GENERALIZED


FIELD_CSV_HEADER = ("omega1", "omega2", "v1", "v2", "P")


def field_table(a: MultiplierField) -> np.ndarray:
    """Rows ``(omega1, omega2, v1, v2, P)`` in increasing-frequency order."""
    if a.kind != "vector_pseudovector":
        raise MultiplierError(f"{a.name} is a scalar multiplier; no vector field to export")
    _require_2d(a.grid)
    reg = a.regular
    odd_err = np.linalg.norm(a.v + a.grid.negate(a.v), axis=-1)
    if np.any(odd_err[reg] > VALIDATION_TOL):
        raise MultiplierError(f"{a.name}: v(-omega) != -v(omega)")
    cols = [a.grid.omega[..., 0], a.grid.omega[..., 1], a.v[..., 0], a.v[..., 1], a.P]
    cols = [a.grid.logical_order(c) for c in cols]
    return np.stack([c.ravel() for c in cols], axis=-1)


def field_export(a: MultiplierField, path) -> np.ndarray:
    rows = field_table(a)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(FIELD_CSV_HEADER)
        for row in rows:
            writer.writerow([f"{x:.17g}" for x in row])
    return rows


CONSTRUCTORS: dict[str, Callable[..., MultiplierField]] = {
    "hahn": make_hahn,
    "hypercomplex": make_hypercomplex,
    "modified-hypercomplex": make_modified_hypercomplex,
    "monogenic": make_monogenic,
    "scalar-set-1d": make_sign,
}


def build(name: str, grid: FrequencyGrid, seed: int | None = None,
          params: ParametricParams | None = None) -> MultiplierField:
    """Construct a multiplier by its command-line name."""
    if name == "random":
        return make_random_unit(grid, 0 if seed is None else seed)
    if name == "parametric":
        return make_parametric(grid, params)
    if name not in CONSTRUCTORS:
        raise MultiplierError(f"unknown multiplier {name!r}")
    return CONSTRUCTORS[name](grid)
