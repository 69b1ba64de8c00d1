"""Exact linear algebra over the rationals.

Matrices are numpy object arrays holding :class:`fractions.Fraction` entries.
Nothing in here ever touches floating point.
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from .errors import DimensionMismatchError, SingularError

ZERO = Fraction(0)
ONE = Fraction(1)


def to_fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, bool) or isinstance(x, float):
        raise TypeError(f"refusing inexact or boolean value {x!r}")
    return Fraction(x)


def frac_matrix(rows: Iterable[Sequence]) -> np.ndarray:
    """Build a 2-d object array of Fractions from nested sequences."""
    data = [[to_fraction(x) for x in row] for row in rows]
    if not data:
        return np.empty((0, 0), dtype=object)
    width = len(data[0])
    if any(len(r) != width for r in data):
        raise DimensionMismatchError("ragged matrix rows")
    out = np.empty((len(data), width), dtype=object)
    for i, row in enumerate(data):
        for j, x in enumerate(row):
            out[i, j] = x
    return out


def as_frac_array(a) -> np.ndarray:
    """Coerce any array-like (ints, Fractions, nested lists) to a Fraction object array."""
    arr = np.asarray(a, dtype=object)
    out = np.empty(arr.shape, dtype=object)
    for idx, x in np.ndenumerate(arr):
        out[idx] = to_fraction(x)
    return out


def zeros(*shape: int) -> np.ndarray:
    out = np.empty(shape, dtype=object)
    out.fill(ZERO)
    return out


def eye(n: int) -> np.ndarray:
    out = zeros(n, n)
    for i in range(n):
        out[i, i] = ONE
    return out


def is_zero(a: np.ndarray) -> bool:
    return all(x == 0 for x in a.flat)


def equal(a: np.ndarray, b: np.ndarray) -> bool:
    return a.shape == b.shape and all(x == y for x, y in zip(a.flat, b.flat))


def first_nonzero(a: np.ndarray):
    """Index and value of the first nonzero entry, or None."""
    for idx, x in np.ndenumerate(a):
        if x != 0:
            return idx, x
    return None


def block(blocks: Sequence[Sequence[np.ndarray]]) -> np.ndarray:
    return np.block([[np.asarray(b, dtype=object) for b in row] for row in blocks])


def rref(a: np.ndarray) -> tuple[np.ndarray, list[int]]:
    """Reduced row echelon form and pivot columns."""
    m = a.copy()
    rows, cols = m.shape
    pivots: list[int] = []
    r = 0
    for c in range(cols):
        if r >= rows:
            break
        p = next((i for i in range(r, rows) if m[i, c] != 0), None)
        if p is None:
            continue
        if p != r:
            m[[r, p]] = m[[p, r]]
        pv = m[r, c]
        if pv != 1:
            m[r, :] = [x / pv for x in m[r, :]]
        for i in range(rows):
            if i != r and m[i, c] != 0:
                f = m[i, c]
                m[i, :] = [x - f * y for x, y in zip(m[i, :], m[r, :])]
        pivots.append(c)
        r += 1
    return m, pivots


def rank(a: np.ndarray) -> int:
    return len(rref(a)[1])


def nullspace(a: np.ndarray) -> list[np.ndarray]:
    """Basis of {x : a @ x = 0}, one vector per free column."""
    rows, cols = a.shape
    if rows == 0:
        return [eye(cols)[:, j].copy() for j in range(cols)]
    m, pivots = rref(a)
    free = [c for c in range(cols) if c not in pivots]
    basis = []
    for f in free:
        v = zeros(cols)
        v[f] = ONE
        for r, p in enumerate(pivots):
            v[p] = -m[r, f]
        basis.append(v)
    return basis


def det(a: np.ndarray) -> Fraction:
    n, k = a.shape
    if n != k:
        raise DimensionMismatchError(f"determinant of non-square {a.shape} matrix")
    m = a.copy()
    out = ONE
    for c in range(n):
        p = next((i for i in range(c, n) if m[i, c] != 0), None)
        if p is None:
            return ZERO
        if p != c:
            m[[c, p]] = m[[p, c]]
            out = -out
        pv = m[c, c]
        out *= pv
        for i in range(c + 1, n):
            if m[i, c] != 0:
                f = m[i, c] / pv
                m[i, c:] = [x - f * y for x, y in zip(m[i, c:], m[c, c:])]
    return out


def inverse(a: np.ndarray) -> np.ndarray:
    """Gauss-Jordan inverse; raises SingularError for singular input."""
    n, k = a.shape
    if n != k:
        raise DimensionMismatchError(f"inverse of non-square {a.shape} matrix")
    aug = np.hstack([a, eye(n)])
    red, pivots = rref(aug)
    if pivots[:n] != list(range(n)):
        raise SingularError("matrix is singular")
    return red[:, n:].copy()


def leading_principal_minors(a: np.ndarray) -> list[Fraction]:
    return [det(a[:k, :k]) for k in range(1, a.shape[0] + 1)]


def is_skew(a: np.ndarray) -> bool:
    return equal(a.T, -a)


def is_symmetric(a: np.ndarray) -> bool:
    return equal(a.T, a)


def freeze(a: np.ndarray) -> np.ndarray:
    a.flags.writeable = False
    return a


def to_pairs(a: np.ndarray) -> list:
    """Nested lists of (numerator, denominator) tuples, shape-preserving."""
    if a.ndim == 1:
        return [(x.numerator, x.denominator) for x in a]
    return [to_pairs(row) for row in a]


def _integer_form(a: np.ndarray) -> tuple[np.ndarray, int]:
    """Integer array n and denominator q with a = n / q."""
    q = 1
    for x in a.flat:
        den = x.denominator if isinstance(x, Fraction) else 1
        if q % den:
            q = q * den // math.gcd(q, den)
    out = np.empty(a.shape, dtype=object)
    for idx, x in np.ndenumerate(a):
        out[idx] = x.numerator * (q // x.denominator)
    return out, q


def matmul(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Exact product of Fraction arrays, computed over the integers.

    Python integers multiply far faster than Fractions, which matters for
    the tensor contractions that dominate the torsion computations.
    """
    ia, qa = _integer_form(a)
    ib, qb = _integer_form(b)
    prod = ia @ ib
    q = qa * qb
    out = np.empty(prod.shape, dtype=object)
    zero = Fraction(0)
    for idx, x in np.ndenumerate(prod):
        out[idx] = Fraction(x, q) if x else zero
    return out
