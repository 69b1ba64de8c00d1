"""Graded commutative algebra of Λ(A ⊕ A*) with the big bracket.

The algebra is a Grassmann algebra on 2d odd generators.  Generator ``k`` with
``k < d`` is θ^(k+1) (a basis vector of A, bidegree (1, 0)); generator ``k``
with ``k >= d`` is ξ_(k-d+1) (a basis covector of A*, bidegree (0, 1)).

A monomial is stored as a bitmask of generators, read in increasing generator
order, so every θ factor precedes every ξ factor.  The sign of a term lives in
its coefficient.

The big bracket is the degree -2 Poisson bracket determined by
{θ^a, ξ_b} = {ξ_b, θ^a} = δ^a_b, with all other generator brackets zero.  On
elements it is computed as

    {f, g} = Σ_a (f ∂⃖/∂θ^a)(∂⃗/∂ξ_a g) + (f ∂⃖/∂ξ_a)(∂⃗/∂θ^a g)

with right derivatives acting on ``f`` and left derivatives acting on ``g``.
"""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from itertools import combinations
from typing import Iterable, Iterator, Mapping, Optional, Sequence

from .errors import DegreeError, DimensionMismatchError


@dataclass(frozen=True)
class BasisSpec:
    dim: int
    names: Optional[tuple[str, ...]] = None

    def __post_init__(self):
        if not isinstance(self.dim, int) or self.dim < 1:
            raise ValueError(f"dim must be a positive integer, got {self.dim!r}")
        if self.names is not None:
            names = tuple(self.names)
            if len(names) != self.dim:
                raise ValueError(f"expected {self.dim} names, got {len(names)}")
            if len(set(names)) != len(names):
                raise ValueError("basis names must be distinct")
            object.__setattr__(self, "names", names)

    @property
    def size(self) -> int:
        """Number of generators, 2d."""
        return 2 * self.dim

    def a_names(self) -> tuple[str, ...]:
        return self.names or tuple(f"e{a}" for a in range(1, self.dim + 1))

    def dual_names(self) -> tuple[str, ...]:
        return tuple(n + "*" for n in self.a_names())

    def generator_label(self, k: int) -> str:
        d = self.dim
        if self.names is None:
            return f"θ{k + 1}" if k < d else f"ξ{k - d + 1}"
        return self.a_names()[k] if k < d else self.dual_names()[k - d]


@dataclass(frozen=True, order=True)
class Bidegree:
    p: int
    q: int

    @property
    def total(self) -> int:
        return self.p + self.q


@dataclass(frozen=True)
class Monomial:
    """θ^I ξ_J with 1-based, strictly increasing index tuples."""

    up: tuple[int, ...] = ()
    down: tuple[int, ...] = ()

    def __post_init__(self):
        for idx in (self.up, self.down):
            if any(b <= a for a, b in zip(idx, idx[1:])):
                raise ValueError(f"indices must be strictly increasing: {idx}")
            if idx and idx[0] < 1:
                raise ValueError(f"indices are 1-based: {idx}")

    @property
    def bidegree(self) -> Bidegree:
        return Bidegree(len(self.up), len(self.down))

    def to_mask(self, d: int) -> int:
        if (self.up and self.up[-1] > d) or (self.down and self.down[-1] > d):
            raise DimensionMismatchError(f"{self} references an index above {d}")
        mask = 0
        for a in self.up:
            mask |= 1 << (a - 1)
        for a in self.down:
            mask |= 1 << (d + a - 1)
        return mask

    @classmethod
    def from_mask(cls, mask: int, d: int) -> "Monomial":
        up = tuple(a + 1 for a in range(d) if mask >> a & 1)
        down = tuple(a + 1 for a in range(d) if mask >> (d + a) & 1)
        return cls(up, down)


def _popcount(x: int) -> int:
    return x.bit_count()


def _product_sign(m1: int, m2: int) -> int:
    """Sign of reordering (m1)(m2) into increasing generator order."""
    inv = 0
    rest = m2
    while rest:
        low = rest & -rest
        j = low.bit_length() - 1
        inv += _popcount(m1 >> (j + 1))
        rest ^= low
    return -1 if inv & 1 else 1


def _bits(mask: int) -> Iterator[int]:
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


class GradedElement:
    """Immutable element of Λ(A ⊕ A*) with exact rational coefficients."""


    def __init__(self, basis: BasisSpec, terms: Mapping[int, Fraction] | None = None):
        self.basis = basis
        clean: dict[int, Fraction] = {}
        limit = 1 << basis.size
        for mask, c in (terms or {}).items():
            if not 0 <= mask < limit:
                raise DimensionMismatchError(f"monomial mask {mask:#x} outside dimension {basis.dim}")
            c = Fraction(c)
            if c != 0:
                clean[mask] = c
        self._terms = clean

    # -- construction -------------------------------------------------------

    @classmethod
    def zero(cls, basis: BasisSpec) -> "GradedElement":
        return cls(basis)

    @classmethod
    def scalar(cls, basis: BasisSpec, c) -> "GradedElement":
        return cls(basis, {0: Fraction(c)})

    @classmethod
    def generator(cls, basis: BasisSpec, k: int) -> "GradedElement":
        if not 0 <= k < basis.size:
            raise DimensionMismatchError(f"generator {k} outside 0..{basis.size - 1}")
        return cls(basis, {1 << k: Fraction(1)})

    @classmethod
    def from_monomials(cls, basis: BasisSpec, items: Iterable[tuple[Monomial, object]]) -> "GradedElement":
        acc: dict[int, Fraction] = defaultdict(Fraction)
        for mono, c in items:
            acc[mono.to_mask(basis.dim)] += Fraction(c)
        return cls(basis, acc)

    # -- inspection -----------------------------------------------------------

    @property
    def terms(self) -> Mapping[int, Fraction]:
        return dict(self._terms)

    def items(self):
        return self._terms.items()

    def monomials(self) -> list[tuple[Monomial, Fraction]]:
        d = self.basis.dim
        return [(Monomial.from_mask(m, d), c) for m, c in sorted(self._terms.items())]

    def coefficient(self, mono: Monomial | int) -> Fraction:
        mask = mono if isinstance(mono, int) else mono.to_mask(self.basis.dim)
        return self._terms.get(mask, Fraction(0))

    def is_zero(self) -> bool:
        return not self._terms

    def __bool__(self) -> bool:
        return bool(self._terms)

    def __len__(self) -> int:
        return len(self._terms)

    def degrees(self) -> set[int]:
        return {_popcount(m) for m in self._terms}

    def total_degree(self) -> Optional[int]:
        """Common total degree of all terms, or None when mixed or zero."""
        degs = self.degrees()
        return degs.pop() if len(degs) == 1 else None

    def bidegree_of_mask(self, mask: int) -> Bidegree:
        d = self.basis.dim
        low = (1 << d) - 1
        return Bidegree(_popcount(mask & low), _popcount(mask >> d))

    # -- arithmetic ---------------------------------------------------------------

    def _check(self, other: "GradedElement"):
        if not isinstance(other, GradedElement):
            raise TypeError(f"expected GradedElement, got {type(other).__name__}")
        if other.basis.dim != self.basis.dim:
            raise DimensionMismatchError(f"dimension {self.basis.dim} vs {other.basis.dim}")

    def __add__(self, other: "GradedElement") -> "GradedElement":
        self._check(other)
        acc = dict(self._terms)
        for m, c in other._terms.items():
            acc[m] = acc.get(m, 0) + c
        return GradedElement(self.basis, acc)

    def __neg__(self) -> "GradedElement":
        return GradedElement(self.basis, {m: -c for m, c in self._terms.items()})

    def __sub__(self, other: "GradedElement") -> "GradedElement":
        return self + (-other)

    def scale(self, c) -> "GradedElement":
        c = Fraction(c)
        return GradedElement(self.basis, {m: c * x for m, x in self._terms.items()})

    def __mul__(self, other):
        if isinstance(other, GradedElement):
            return wedge(self, other)
        if isinstance(other, float):
            return NotImplemented
        return self.scale(other)

    def __rmul__(self, other):
        if isinstance(other, (int, Fraction)) and not isinstance(other, bool):
            return self.scale(other)
        return NotImplemented

    def __eq__(self, other) -> bool:
        if not isinstance(other, GradedElement):
            return NotImplemented
        return self.basis.dim == other.basis.dim and self._terms == other._terms

    def component(self, bidegree: Bidegree | tuple[int, int]) -> "GradedElement":
        p, q = bidegree if isinstance(bidegree, tuple) else (bidegree.p, bidegree.q)
        d = self.basis.dim
        low = (1 << d) - 1
        return GradedElement(
            self.basis,
            {m: c for m, c in self._terms.items() if _popcount(m & low) == p and _popcount(m >> d) == q},
        )

    # -- derivative tables, cached per element ------------------------------------

    @cached_property
    def _right_derivatives(self) -> dict[int, list[tuple[int, Fraction]]]:
        out: dict[int, list[tuple[int, Fraction]]] = defaultdict(list)
        for m, c in self._terms.items():
            for k in _bits(m):
                sign = -1 if _popcount(m >> (k + 1)) & 1 else 1
                out[k].append((m ^ (1 << k), c if sign > 0 else -c))
        return dict(out)

    @cached_property
    def _left_derivatives(self) -> dict[int, list[tuple[int, Fraction]]]:
        out: dict[int, list[tuple[int, Fraction]]] = defaultdict(list)
        for m, c in self._terms.items():
            for k in _bits(m):
                sign = -1 if _popcount(m & ((1 << k) - 1)) & 1 else 1
                out[k].append((m ^ (1 << k), c if sign > 0 else -c))
        return dict(out)

    def left_derivative(self, k: int) -> "GradedElement":
        return GradedElement(self.basis, dict(self._left_derivatives.get(k, ())))

    def right_derivative(self, k: int) -> "GradedElement":
        return GradedElement(self.basis, dict(self._right_derivatives.get(k, ())))

    # -- display ------------------------------------------------------------------

    def __repr__(self) -> str:
        return f"GradedElement(dim={self.basis.dim}, {self})"

    def __str__(self) -> str:
        if not self._terms:
            return "0"
        parts = []
        for m, c in sorted(self._terms.items(), key=lambda t: (_popcount(t[0]), t[0])):
            word = "∧".join(self.basis.generator_label(k) for k in _bits(m))
            if not word:
                parts.append(str(c))
            elif c == 1:
                parts.append(word)
            elif c == -1:
                parts.append("-" + word)
            else:
                parts.append(f"{c}·{word}")
        return " + ".join(parts).replace("+ -", "- ")


# -- generators ------------------------------------------------------------------


def theta(basis: BasisSpec, a: int) -> GradedElement:
    """θ^a, the a-th basis vector of A (1-based)."""
    if not 1 <= a <= basis.dim:
        raise DimensionMismatchError(f"index {a} outside 1..{basis.dim}")
    return GradedElement.generator(basis, a - 1)


def xi(basis: BasisSpec, a: int) -> GradedElement:
    """ξ_a, the a-th basis covector of A* (1-based)."""
    if not 1 <= a <= basis.dim:
        raise DimensionMismatchError(f"index {a} outside 1..{basis.dim}")
    return GradedElement.generator(basis, basis.dim + a - 1)


def section(basis: BasisSpec, coords: Sequence) -> GradedElement:
    """Degree-1 element from a length-2d coordinate vector (θ-block, then ξ-block)."""
    if len(coords) != basis.size:
        raise DimensionMismatchError(f"expected {basis.size} coordinates, got {len(coords)}")
    return GradedElement(basis, {1 << k: Fraction(c) for k, c in enumerate(coords)})


def coordinates(u: GradedElement) -> list[Fraction]:
    """Inverse of :func:`section`."""
    deg = u.degrees()
    if deg - {1}:
        raise DegreeError(f"expected a degree-1 element, got degrees {sorted(deg)}")
    return [u.coefficient(1 << k) for k in range(u.basis.size)]


# -- core operations ------------------------------------------------------------


def wedge(a: GradedElement, b: GradedElement) -> GradedElement:
    a._check(b)
    acc: dict[int, Fraction] = defaultdict(Fraction)
    for m1, c1 in a._terms.items():
        for m2, c2 in b._terms.items():
            if m1 & m2:
                continue
            acc[m1 | m2] += _product_sign(m1, m2) * c1 * c2
    return GradedElement(a.basis, acc)


def bidegree_of(a: GradedElement) -> Optional[Bidegree]:
    comps = homogeneous_components(a)
    if len(comps) != 1:
        return None
    return next(iter(comps))


def homogeneous_components(a: GradedElement) -> dict[Bidegree, GradedElement]:
    groups: dict[Bidegree, dict[int, Fraction]] = defaultdict(dict)
    for m, c in a._terms.items():
        groups[a.bidegree_of_mask(m)][m] = c
    return {bd: GradedElement(a.basis, t) for bd, t in sorted(groups.items())}


def big_bracket(a: GradedElement, b: GradedElement) -> GradedElement:
    a._check(b)
    d = a.basis.dim
    right = a._right_derivatives
    left = b._left_derivatives
    acc: dict[int, Fraction] = defaultdict(Fraction)
    for k, fa in right.items():
        gb = left.get(k + d if k < d else k - d)
        if not gb:
            continue
        for m1, c1 in fa:
            for m2, c2 in gb:
                if m1 & m2:
                    continue
                acc[m1 | m2] += _product_sign(m1, m2) * c1 * c2
    return GradedElement(a.basis, acc)


def pairing(u: GradedElement, v: GradedElement) -> Fraction:
    """The split pairing ⟨X + α, Y + β⟩ = α(Y) + β(X) on degree-1 elements."""
    for w in (u, v):
        if w.degrees() - {1}:
            raise DegreeError(f"pairing needs degree-1 elements, got degrees {sorted(w.degrees())}")
    u._check(v)
    return big_bracket(u, v).coefficient(0)


def identity_element(basis: BasisSpec) -> GradedElement:
    """The (1,1) element id_A, normalised so {id_A, χ} = (q - p) χ on F^{p,q}."""
    d = basis.dim
    # ξ_a θ^a = -θ^a ξ_a in canonical order
    return GradedElement(basis, {(1 << a) | (1 << (d + a)): Fraction(-1) for a in range(d)})


def swap_roles(a: GradedElement) -> GradedElement:
    """The Poisson automorphism exchanging θ^a and ξ_a (identifies A with (A*)*)."""
    d = a.basis.dim
    low = (1 << d) - 1
    acc = {}
    for m, c in a._terms.items():
        up, down = m & low, m >> d
        # ξ^I θ^J reordered to θ^J ξ^I
        sign = -1 if (_popcount(up) * _popcount(down)) & 1 else 1
        acc[(up << d) | down] = sign * c
    return GradedElement(a.basis, acc)


def monomial_masks(basis: BasisSpec, degree: int) -> list[int]:
    """All monomial masks of the given total degree, in increasing order."""
    out = []
    for combo in combinations(range(basis.size), degree):
        m = 0
        for k in combo:
            m |= 1 << k
        out.append(m)
    return sorted(out)


def bidegree_masks(basis: BasisSpec, p: int, q: int) -> list[int]:
    d = basis.dim
    out = []
    for up in combinations(range(d), p):
        for down in combinations(range(d), q):
            m = 0
            for k in up:
                m |= 1 << k
            for k in down:
                m |= 1 << (d + k)
            out.append(m)
    return sorted(out)
