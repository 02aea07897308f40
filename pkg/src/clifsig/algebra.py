"""Dense real geometric algebra G_L with Euclidean signature.

Blades are addressed by bitmask: bit ``k`` set means generator ``e_{k+1}``
appears in the (ascending) blade product. Coefficient arrays carry the
blade axis last, so the same kernels serve single multivectors and whole
grids of them.
"""
from __future__ import annotations

from functools import lru_cache
from typing import Sequence

import numpy as np

MAX_DIM = 7


def grade_of(bits: int) -> int:
    return bin(bits).count("1")


def _reorder_sign(a: int, b: int) -> int:
    # Number of transpositions needed to sort the concatenation of blades a, b.
    swaps = 0
    a >>= 1
    while a:
        swaps += grade_of(a & b)
        a >>= 1
    return -1 if swaps & 1 else 1


def blade_name(bits: int) -> str:
    if bits == 0:
        return "1"
    return "e" + "".join(str(k + 1) for k in range(bits.bit_length()) if bits >> k & 1)


class AlgebraTable:
    """Sign and result-blade tables for all blade products of G_L.

    Use :func:`algebra_table` to obtain the shared, cached instance.
    """

    def __init__(self, dim: int):
        if not 1 <= dim <= MAX_DIM:
            raise ValueError(f"algebra dimension must be in [1, {MAX_DIM}], got {dim}")
        self.dim = dim
        self.size = 1 << dim
        idx = np.arange(self.size)
        self.result = idx[:, None] ^ idx[None, :]
        self.sign = np.array(
            [[_reorder_sign(i, j) for j in range(self.size)] for i in range(self.size)],
            dtype=np.float64,
        )
        self.grades = np.array([grade_of(i) for i in range(self.size)])
        # For fixed left blade i, perm[i][k] is the right blade j with i ^ j == k.
        self._perm = self.result
        self._perm_sign = np.take_along_axis(self.sign, self._perm, axis=1)
        for arr in (self.result, self.sign, self.grades, self._perm_sign):
            arr.setflags(write=False)

    def names(self) -> list[str]:
        return [blade_name(i) for i in range(self.size)]

    def product(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        """Geometric product of coefficient arrays with the blade axis last."""
        a = np.asarray(a, dtype=np.float64)
        b = np.asarray(b, dtype=np.float64)
        if a.shape[-1] != self.size or b.shape[-1] != self.size:
            raise ValueError(
                f"blade axis must have length {self.size}, got {a.shape[-1]} and {b.shape[-1]}"
            )
        out = np.zeros(np.broadcast_shapes(a.shape, b.shape), dtype=np.float64)
        for i in range(self.size):
            ai = a[..., i : i + 1]
            if not np.any(ai):
                continue
            out += ai * (self._perm_sign[i] * b[..., self._perm[i]])
        return out


@lru_cache(maxsize=None)
def algebra_table(dim: int) -> AlgebraTable:
    return AlgebraTable(dim)


class Multivector:
    """Immutable element of G_L stored as 2**L blade coefficients."""

    __slots__ = ("dim", "coeffs")

    def __init__(self, coeffs: Sequence[float] | np.ndarray, dim: int | None = None):
        c = np.array(coeffs, dtype=np.float64)
        if c.ndim != 1:
            raise ValueError("coefficients must be one-dimensional")
        if dim is None:
            dim = c.size.bit_length() - 1
        if c.size != 1 << dim:
            raise ValueError(f"expected {1 << dim} coefficients for L={dim}, got {c.size}")
        c.setflags(write=False)
        object.__setattr__(self, "dim", dim)
        object.__setattr__(self, "coeffs", c)

    def __setattr__(self, name, value):
        raise AttributeError("Multivector is immutable")

    @classmethod
    def scalar(cls, value: float, dim: int = 3) -> "Multivector":
        c = np.zeros(1 << dim)
        c[0] = value
        return cls(c, dim)

    @classmethod
    def blade(cls, bits: int, dim: int = 3, value: float = 1.0) -> "Multivector":
        if not 0 <= bits < 1 << dim:
            raise ValueError(f"blade index {bits} out of range for L={dim}")
        c = np.zeros(1 << dim)
        c[bits] = value
        return cls(c, dim)

    @classmethod
    def basis_vector(cls, k: int, dim: int = 3) -> "Multivector":
        """Generator ``e_k`` with 1-based ``k``."""
        return cls.blade(1 << (k - 1), dim)

    @property
    def table(self) -> AlgebraTable:
        return algebra_table(self.dim)

    def _check(self, other: "Multivector") -> None:
        if other.dim != self.dim:
            raise ValueError(f"dimension mismatch: L={self.dim} vs L={other.dim}")

    def __add__(self, other):
        if isinstance(other, Multivector):
            self._check(other)
            return Multivector(self.coeffs + other.coeffs, self.dim)
        if np.isscalar(other):
            return self + Multivector.scalar(float(other), self.dim)
        return NotImplemented

    __radd__ = __add__

    def __neg__(self):
        return Multivector(-self.coeffs, self.dim)

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, Multivector):
            return geometric_product(self, other)
        if np.isscalar(other):
            return Multivector(self.coeffs * float(other), self.dim)
        return NotImplemented

    def __rmul__(self, other):
        if np.isscalar(other):
            return Multivector(self.coeffs * float(other), self.dim)
        return NotImplemented

    def __truediv__(self, other):
        if np.isscalar(other):
            return Multivector(self.coeffs / float(other), self.dim)
        return NotImplemented

    def __eq__(self, other):
        if not isinstance(other, Multivector):
            return NotImplemented
        return self.dim == other.dim and np.array_equal(self.coeffs, other.coeffs)

    def __hash__(self):
        return hash((self.dim, self.coeffs.tobytes()))

    def __getitem__(self, bits: int) -> float:
        return float(self.coeffs[bits])

    def allclose(self, other: "Multivector", tol: float = 1e-12) -> bool:
        self._check(other)
        return float(np.max(np.abs(self.coeffs - other.coeffs))) <= tol

    @property
    def even(self) -> "Multivector":
        return Multivector(np.where(self.table.grades % 2 == 0, self.coeffs, 0.0), self.dim)

    @property
    def odd(self) -> "Multivector":
        return Multivector(np.where(self.table.grades % 2 == 1, self.coeffs, 0.0), self.dim)

    def __repr__(self):
        terms = [
            f"{c:+.6g}*{blade_name(i)}" if i else f"{c:+.6g}"
            for i, c in enumerate(self.coeffs)
            if c != 0
        ]
        return f"Multivector(L={self.dim}: {' '.join(terms) or '0'})"


def geometric_product(a: Multivector, b: Multivector) -> Multivector:
    a._check(b)
    return Multivector(a.table.product(a.coeffs, b.coeffs), a.dim)


def pseudoscalar(dim: int = 3) -> Multivector:
    """Unit pseudoscalar ``e_1 ... e_L``; requires ``L = 4n + 3`` so it is central and squares to -1."""
    if dim < 3 or dim % 4 != 3:
        raise ValueError(f"pseudoscalar requires L = 4n+3, got L={dim}")
    return Multivector.blade((1 << dim) - 1, dim)


def pseudovector(dim: int = 3) -> Multivector:
    """``I_{L-1} = e_1 ... e_{L-1}``."""
    return Multivector.blade((1 << (dim - 1)) - 1, dim)


def grade_project(a: Multivector, k: int) -> Multivector:
    if not 0 <= k <= a.dim:
        raise ValueError(f"grade {k} outside [0, {a.dim}]")
    return Multivector(np.where(a.table.grades == k, a.coeffs, 0.0), a.dim)


def is_idempotent(a: Multivector, tol: float = 1e-12) -> bool:
    if tol <= 0:
        raise ValueError("tol must be positive")
    return float(np.max(np.abs((a * a).coeffs - a.coeffs))) <= tol
