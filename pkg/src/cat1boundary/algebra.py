"""Normed division algebras R, C, H, O and the indefinite form on K^(n+1).

Elements are stored as real coefficient arrays of length 1, 2, 4 or 8 in the
Cayley-Dickson basis.  Vectors over K are arrays of shape ``(n+1, dim)``;
scalars act on the right.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

DIMS = {"R": 1, "C": 2, "H": 4, "O": 8}
ASSOCIATIVE = frozenset("RCH")

# relative tolerance for deciding an associator vanishes
ASSOCIATOR_TOL = 1e-12


class AlgebraError(ValueError):
    pass


def _check_tag(tag):
    if tag not in DIMS:
        raise AlgebraError(f"unknown algebra tag {tag!r}")
    return DIMS[tag]


def _cd_conj(a):
    out = -a
    out[0] = a[0]
    return out


def _cd_mul(a, b):
    # (a1, a2)(b1, b2) = (a1 b1 - conj(b2) a2, b2 a1 + a2 conj(b1))
    n = len(a)
    if n == 1:
        return a * b
    h = n // 2
    a1, a2, b1, b2 = a[:h], a[h:], b[:h], b[h:]
    return np.concatenate([
        _cd_mul(a1, b1) - _cd_mul(_cd_conj(b2), a2),
        _cd_mul(b2, a1) + _cd_mul(a2, _cd_conj(b1)),
    ])


@lru_cache(maxsize=None)
def structure_constants(dim: int) -> np.ndarray:
    """Tensor ``T`` with ``e_i e_j = sum_k T[i, j, k] e_k``."""
    eye = np.eye(dim)
    table = np.empty((dim, dim, dim))
    for i in range(dim):
        for j in range(dim):
            table[i, j] = _cd_mul(eye[i], eye[j])
    table.setflags(write=False)
    return table


def multiplication_table(tag: str) -> list[list[str]]:
    """Signed basis labels ``e_i e_j`` as strings, for documentation."""
    dim = _check_tag(tag)
    table = structure_constants(dim)
    rows = []
    for i in range(dim):
        row = []
        for j in range(dim):
            k = int(np.flatnonzero(table[i, j])[0])
            sign = "-" if table[i, j, k] < 0 else "+"
            row.append(f"{sign}e{k}")
        rows.append(row)
    return rows


# -- array level ------------------------------------------------------------

def kmul(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Broadcasting product of coefficient arrays (last axis = algebra)."""
    dim = a.shape[-1]
    if dim == 1:
        return a * b
    return np.einsum("...i,...j,ijk->...k", a, b, structure_constants(dim))


def kconj(a: np.ndarray) -> np.ndarray:
    out = -a
    out[..., 0] = a[..., 0]
    return out


def knorm2(a: np.ndarray) -> np.ndarray:
    return np.sum(a * a, axis=-1)


def kinv(a: np.ndarray) -> np.ndarray:
    return kconj(a) / knorm2(a)[..., None]


def form_signature(length: int) -> np.ndarray:
    sig = np.ones(length)
    sig[-1] = -1.0
    return sig


def form(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    """<x|y> = sum_k conj(x_k) y_k - conj(x_last) y_last, on raw arrays."""
    prods = kmul(kconj(x), y)
    return prods[..., :-1, :].sum(axis=-2) - prods[..., -1, :]


def real_form(x: np.ndarray, y: np.ndarray) -> float:
    """Real part of <x|y>; the Riemannian metric on tangent vectors."""
    return float(np.dot(form_signature(x.shape[0]), np.sum(x * y, axis=-1)))


def rscale(x: np.ndarray, lam: np.ndarray) -> np.ndarray:
    """Right multiplication of every entry of ``x`` by the scalar ``lam``."""
    return kmul(x, np.broadcast_to(lam, x.shape))


# -- value types ------------------------------------------------------------

@dataclass(frozen=True)
class Scalar:
    """Element of R, C, H or O."""

    tag: str
    coeffs: tuple

    def __post_init__(self):
        dim = _check_tag(self.tag)
        coeffs = tuple(float(c) for c in self.coeffs)
        if len(coeffs) != dim:
            raise AlgebraError(
                f"{self.tag} needs {dim} coefficients, got {len(coeffs)}")
        object.__setattr__(self, "coeffs", coeffs)

    @classmethod
    def from_array(cls, tag, arr):
        return cls(tag, tuple(np.asarray(arr, dtype=float).ravel()))

    @classmethod
    def real(cls, tag, value=1.0):
        dim = _check_tag(tag)
        return cls(tag, (value,) + (0.0,) * (dim - 1))

    @classmethod
    def unit(cls, tag, k):
        dim = _check_tag(tag)
        coeffs = [0.0] * dim
        coeffs[k] = 1.0
        return cls(tag, coeffs)

    @property
    def array(self) -> np.ndarray:
        return np.array(self.coeffs)

    def _same(self, other):
        if isinstance(other, (int, float)):
            return Scalar.real(self.tag, other)
        if not isinstance(other, Scalar):
            return NotImplemented
        if other.tag != self.tag:
            raise AlgebraError(f"tag mismatch: {self.tag} vs {other.tag}")
        return other

    def __add__(self, other):
        other = self._same(other)
        if other is NotImplemented:
            return other
        return Scalar.from_array(self.tag, self.array + other.array)

    __radd__ = __add__

    def __neg__(self):
        return Scalar.from_array(self.tag, -self.array)

    def __sub__(self, other):
        other = self._same(other)
        if other is NotImplemented:
            return other
        return Scalar.from_array(self.tag, self.array - other.array)

    def __mul__(self, other):
        other = self._same(other)
        if other is NotImplemented:
            return other
        return mul(self, other)

    def __rmul__(self, other):
        other = self._same(other)
        if other is NotImplemented:
            return other
        return mul(other, self)

    def conj(self):
        return Scalar.from_array(self.tag, kconj(self.array))

    def norm(self) -> float:
        return float(np.sqrt(knorm2(self.array)))

    def real_part(self) -> float:
        return self.coeffs[0]

    def imag_norm(self) -> float:
        return float(np.linalg.norm(self.coeffs[1:]))

    def inverse(self):
        return Scalar.from_array(self.tag, kinv(self.array))

    def isclose(self, other, atol=1e-12) -> bool:
        return bool(np.max(np.abs(self.array - other.array)) <= atol)

    def __repr__(self):
        return f"Scalar({self.tag}, {list(self.coeffs)})"


def mul(a: Scalar, b: Scalar) -> Scalar:
    if a.tag != b.tag:
        raise AlgebraError(f"tag mismatch: {a.tag} vs {b.tag}")
    return Scalar.from_array(a.tag, kmul(a.array, b.array))


def associator(a: Scalar, b: Scalar, c: Scalar) -> Scalar:
    """(ab)c - a(bc)."""
    return mul(mul(a, b), c) - mul(a, mul(b, c))


def _as_entries(tag, entries):
    dim = _check_tag(tag)
    if isinstance(entries, np.ndarray) and entries.ndim == 2:
        arr = np.array(entries, dtype=float)
    else:
        rows = []
        for e in entries:
            if isinstance(e, Scalar):
                if e.tag != tag:
                    raise AlgebraError(f"tag mismatch: {tag} vs {e.tag}")
                rows.append(e.array)
            elif isinstance(e, complex):
                row = np.zeros(dim)
                row[0] = e.real
                if e.imag:
                    if dim < 2:
                        raise AlgebraError("complex entry in a real vector")
                    row[1] = e.imag
                rows.append(row)
            elif np.ndim(e) == 0:
                row = np.zeros(dim)
                row[0] = float(e)
                rows.append(row)
            else:
                row = np.zeros(dim)
                e = np.asarray(e, dtype=float)
                row[: len(e)] = e
                rows.append(row)
        arr = np.array(rows, dtype=float)
    if arr.ndim != 2 or arr.shape[1] != dim:
        raise AlgebraError(f"entries have shape {arr.shape}, need (n+1, {dim})")
    return arr


class FormVector:
    """A vector in K^(n+1), n >= 2, as an ``(n+1, dim)`` array."""

    __slots__ = ("tag", "data")

    def __init__(self, tag: str, entries):
        data = _as_entries(tag, entries)
        if data.shape[0] < 3:
            raise AlgebraError("need n >= 2")
        if tag == "O" and data.shape[0] != 3:
            raise AlgebraError("octonionic vectors must have length 3")
        data.setflags(write=False)
        self.tag = tag
        self.data = data

    @property
    def n(self) -> int:
        return self.data.shape[0] - 1

    @property
    def entries(self) -> list[Scalar]:
        return [Scalar.from_array(self.tag, row) for row in self.data]

    def scale(self, lam) -> "FormVector":
        """Right multiplication ``x . lam``."""
        if isinstance(lam, Scalar):
            lam = lam.array
        elif np.ndim(lam) == 0:
            return FormVector(self.tag, self.data * float(lam))
        return FormVector(self.tag, rscale(self.data, np.asarray(lam)))

    def __add__(self, other):
        _check_compatible(self, other)
        return FormVector(self.tag, self.data + other.data)

    def __sub__(self, other):
        _check_compatible(self, other)
        return FormVector(self.tag, self.data - other.data)

    def __neg__(self):
        return FormVector(self.tag, -self.data)

    def __repr__(self):
        return f"FormVector({self.tag}, {self.data.tolist()})"


def _check_compatible(x, y):
    if x.tag != y.tag:
        raise AlgebraError(f"tag mismatch: {x.tag} vs {y.tag}")
    if x.data.shape != y.data.shape:
        raise AlgebraError(
            f"dimension mismatch: {x.data.shape[0]} vs {y.data.shape[0]}")


def hermitian_form(x: FormVector, y: FormVector) -> Scalar:
    _check_compatible(x, y)
    return Scalar.from_array(x.tag, form(x.data, y.data))


def is_associative_triple(x: FormVector) -> bool:
    """Whether x_1, x_2, x_3 generate an associative subalgebra of O.

    All associators among the entries and their conjugates are tested.
    """
    if x.tag != "O" or x.data.shape[0] != 3:
        raise AlgebraError("is_associative_triple needs an octonionic triple")
    return associative_entries(x.data)


def associative_entries(data: np.ndarray) -> bool:
    if data.shape[-1] < 8:
        return True
    gens = [row for row in data if knorm2(row) > 0]
    gens += [kconj(g) for g in gens]
    scale = max((float(np.sqrt(knorm2(g))) for g in gens), default=0.0)
    if scale == 0.0:
        return True
    tol = ASSOCIATOR_TOL * scale ** 3
    for a, b, c in itertools.product(gens, repeat=3):
        assoc = kmul(kmul(a, b), c) - kmul(a, kmul(b, c))
        if np.max(np.abs(assoc)) > tol:
            return False
    return True
