"""Fourier transform on G_3-valued grids with I_3 as the imaginary unit.

Arrays are stored in natural FFT order. A bin with array index ``k`` on an
axis of length ``n`` has signed integer frequency ``k`` when ``k <= n // 2``
and ``k - n`` otherwise, so even axes keep their Nyquist bin at ``+n/2``.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Literal

import numpy as np

from .algebra import algebra_table, blade_name

Domain = Literal["spatial", "frequency"]

PIPELINE_DIM = 3
SCALAR = 0
E1, E2, E3 = 0b001, 0b010, 0b100
E12, E13, E23 = 0b011, 0b101, 0b110
E123 = 0b111

ORACLE_MAX_CELLS = 4096


def reflect(arr: np.ndarray, ndim: int) -> np.ndarray:
    """``arr`` evaluated at the negated index on its first ``ndim`` axes (modulo the grid)."""
    axes = tuple(range(ndim))
    return np.roll(np.flip(arr, axis=axes), 1, axis=axes)


@dataclass(frozen=True)
class FrequencyGrid:
    shape: tuple[int, ...]

    def __post_init__(self):
        shape = tuple(int(n) for n in self.shape)
        if not shape or any(n < 1 for n in shape):
            raise ValueError(f"invalid grid shape {self.shape}")
        object.__setattr__(self, "shape", shape)

    @property
    def ndim(self) -> int:
        return len(self.shape)

    @cached_property
    def axis_bins(self) -> tuple[np.ndarray, ...]:
        return tuple(np.where(np.arange(n) <= n // 2, np.arange(n), np.arange(n) - n) for n in self.shape)

    @cached_property
    def omega(self) -> np.ndarray:
        """Signed integer bin coordinates, shape ``(*shape, ndim)``."""
        mesh = np.meshgrid(*self.axis_bins, indexing="ij")
        out = np.stack(mesh, axis=-1).astype(np.float64)
        out.setflags(write=False)
        return out

    @cached_property
    def nyquist_mask(self) -> np.ndarray:
        mask = np.zeros(self.shape, dtype=bool)
        for axis, n in enumerate(self.shape):
            if n % 2 == 0:
                idx = [slice(None)] * self.ndim
                idx[axis] = n // 2
                mask[tuple(idx)] = True
        return mask

    @cached_property
    def exceptional_mask(self) -> np.ndarray:
        """DC plus every bin with a Nyquist coordinate; these have no proper ``-omega`` partner."""
        mask = self.nyquist_mask.copy()
        mask[(0,) * self.ndim] = True
        mask.setflags(write=False)
        return mask

    def negate(self, arr: np.ndarray) -> np.ndarray:
        return reflect(arr, self.ndim)

    def logical_order(self, arr: np.ndarray) -> np.ndarray:
        """Reorder FFT-ordered data so frequencies increase along each axis.

        Nyquist is labelled ``+n/2``, so it comes last (plain fftshift would put it first).
        """
        shifts = tuple(-(n // 2 + 1) for n in self.shape)
        return np.roll(arr, shifts, axis=tuple(range(self.ndim)))


@dataclass(frozen=True, eq=False)
class MultivectorField:
    """Grid of G_L multivectors; ``coeffs`` has shape ``(*grid, 2**L)``."""

    coeffs: np.ndarray
    domain: Domain = "spatial"
    dim: int = PIPELINE_DIM

    def __post_init__(self):
        c = np.asarray(self.coeffs, dtype=np.float64)
        if c.ndim < 2 or c.shape[-1] != 1 << self.dim:
            raise ValueError(f"coefficient array must end in an axis of length {1 << self.dim}")
        if self.domain not in ("spatial", "frequency"):
            raise ValueError(f"unknown domain {self.domain!r}")
        c = c.copy() if c is self.coeffs else c
        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)

    @classmethod
    def from_scalar(cls, values: np.ndarray, domain: Domain = "spatial", dim: int = PIPELINE_DIM):
        values = np.asarray(values, dtype=np.float64)
        c = np.zeros(values.shape + (1 << dim,))
        c[..., 0] = values
        return cls(c, domain, dim)

    @classmethod
    def zeros(cls, shape: tuple[int, ...], domain: Domain = "spatial", dim: int = PIPELINE_DIM):
        return cls(np.zeros(tuple(shape) + (1 << dim,)), domain, dim)

    @property
    def shape(self) -> tuple[int, ...]:
        return self.coeffs.shape[:-1]

    @property
    def grid(self) -> FrequencyGrid:
        return FrequencyGrid(self.shape)

    def __getitem__(self, bits: int) -> np.ndarray:
        return self.coeffs[..., bits]

    @property
    def scalar(self) -> np.ndarray:
        return self.coeffs[..., 0]

    def replace(self, coeffs: np.ndarray, domain: Domain | None = None) -> "MultivectorField":
        return MultivectorField(coeffs, domain or self.domain, self.dim)

    def __add__(self, other: "MultivectorField") -> "MultivectorField":
        self._check(other)
        return self.replace(self.coeffs + other.coeffs)

    def __sub__(self, other: "MultivectorField") -> "MultivectorField":
        self._check(other)
        return self.replace(self.coeffs - other.coeffs)

    def scale(self, factor: float) -> "MultivectorField":
        return self.replace(self.coeffs * factor)

    def product(self, other: "MultivectorField | np.ndarray", left: bool = False) -> "MultivectorField":
        """Cellwise geometric product ``self * other`` (``other * self`` when ``left``)."""
        oc = other.coeffs if isinstance(other, MultivectorField) else np.asarray(other)
        table = algebra_table(self.dim)
        out = table.product(oc, self.coeffs) if left else table.product(self.coeffs, oc)
        return self.replace(out)

    def _check(self, other: "MultivectorField") -> None:
        if self.shape != other.shape or self.dim != other.dim or self.domain != other.domain:
            raise ValueError("fields differ in shape, algebra dimension or domain")

    def max_abs(self) -> float:
        return float(np.max(np.abs(self.coeffs))) if self.coeffs.size else 0.0

    def component_names(self) -> list[str]:
        return [blade_name(i) for i in range(1 << self.dim)]


def _plane_pairs() -> list[tuple[int, int, float]]:
    # Each base blade b spans an I_3-complex plane {b, I_3 b}; I_3 b = sign * partner.
    table = algebra_table(PIPELINE_DIM)
    pairs = []
    for b in (SCALAR, E1, E2, E3):
        partner = int(table.result[E123, b])
        pairs.append((b, partner, float(table.sign[E123, b])))
    return pairs


PLANES = _plane_pairs()


def _require_pipeline_dim(g: MultivectorField) -> None:
    if g.dim != PIPELINE_DIM:
        raise ValueError(f"transform pipeline supports L={PIPELINE_DIM} only, got L={g.dim}")


def to_planes(g: MultivectorField) -> np.ndarray:
    """Complex array ``(4, *grid)``: plane ``p`` holds ``x + i y`` for ``x b + y I_3 b``."""
    c = g.coeffs
    return np.stack([c[..., b] + 1j * (s * c[..., p]) for b, p, s in PLANES])


def from_planes(z: np.ndarray, domain: Domain) -> MultivectorField:
    c = np.zeros(z.shape[1:] + (1 << PIPELINE_DIM,))
    for zk, (b, p, s) in zip(z, PLANES):
        c[..., b] = zk.real
        c[..., p] = s * zk.imag
    return MultivectorField(c, domain, PIPELINE_DIM)


def forward_ft(g: MultivectorField) -> MultivectorField:
    """Unnormalized forward transform with kernel ``exp(-I_3 x.omega)``."""
    if g.domain != "spatial":
        raise ValueError("forward_ft expects a spatial field")
    _require_pipeline_dim(g)
    axes = tuple(range(1, len(g.shape) + 1))
    return from_planes(np.fft.fftn(to_planes(g), axes=axes), "frequency")


def inverse_ft(G: MultivectorField) -> MultivectorField:
    """Inverse transform carrying the full ``1/prod(N_k)`` factor."""
    if G.domain != "frequency":
        raise ValueError("inverse_ft expects a frequency field")
    _require_pipeline_dim(G)
    axes = tuple(range(1, len(G.shape) + 1))
    return from_planes(np.fft.ifftn(to_planes(G), axes=axes), "spatial")


def brute_force_ft(g: MultivectorField, direction: Literal["fwd", "inv"] = "fwd") -> MultivectorField:
    """Direct O(M^2) evaluation of the transform sum, independent of the FFT path.

    Every term ``g(x) exp(-+I x.omega)`` is expanded as ``g cos -+ (g I) sin``
    with ``g I`` formed by the geometric product.
    """
    if direction not in ("fwd", "inv"):
        raise ValueError(f"direction must be 'fwd' or 'inv', got {direction!r}")
    expected = "spatial" if direction == "fwd" else "frequency"
    if g.domain != expected:
        raise ValueError(f"{direction} transform expects a {expected} field")
    cells = int(np.prod(g.shape))
    if cells > ORACLE_MAX_CELLS:
        raise ValueError(f"oracle limited to {ORACLE_MAX_CELLS} cells, got {cells}")
    _require_pipeline_dim(g)

    shape = g.shape
    table = algebra_table(g.dim)
    ps = np.zeros(1 << g.dim)
    ps[E123] = 1.0
    flat = g.coeffs.reshape(cells, -1)
    flat_i = table.product(flat, ps)

    idx = np.stack(np.meshgrid(*[np.arange(n) for n in shape], indexing="ij"), axis=-1).reshape(cells, -1)
    inv_n = 1.0 / np.asarray(shape, dtype=np.float64)
    # Reduce modulo 2 pi on integers first to keep the phase small.
    prod_int = (idx[:, None, :] * idx[None, :, :]) % np.asarray(shape)
    phase = 2.0 * np.pi * np.sum(prod_int * inv_n, axis=-1)

    sign = -1.0 if direction == "fwd" else 1.0
    out = np.cos(phase) @ flat + sign * (np.sin(phase) @ flat_i)
    if direction == "inv":
        out /= cells
    domain: Domain = "frequency" if direction == "fwd" else "spatial"
    return MultivectorField(out.reshape(shape + (-1,)), domain, g.dim)


def even_odd_split(f: MultivectorField) -> tuple[MultivectorField, MultivectorField]:
    """Split into parts even and odd under ``x -> -x`` (index reflection modulo the grid)."""
    if f.domain != "spatial":
        raise ValueError("even_odd_split expects a spatial field")
    mirrored = reflect(f.coeffs, len(f.shape))
    even = 0.5 * (f.coeffs + mirrored)
    odd = 0.5 * (f.coeffs - mirrored)
    return f.replace(even), f.replace(odd)


@dataclass(frozen=True)
class SpectrumSplit:
    """``F = F_e - I_3 F_o`` for the transform of a real signal."""

    F_e: np.ndarray
    F_o: np.ndarray

    def symmetry_residual(self) -> float:
        nd = self.F_e.ndim
        r_e = np.max(np.abs(reflect(self.F_e, nd) - self.F_e))
        r_o = np.max(np.abs(reflect(self.F_o, nd) + self.F_o))
        return float(max(r_e, r_o))


def spectrum_split(F: MultivectorField) -> SpectrumSplit:
    if F.domain != "frequency":
        raise ValueError("spectrum_split expects a frequency field")
    return SpectrumSplit(F.scalar.copy(), -F[E123].copy())
