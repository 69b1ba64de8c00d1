"""(Pre-)Courant structures on E = A ⊕ A* over a point.

A pre-Courant structure is any degree-3 element Θ; its Dorfman bracket is the
derived bracket [X, Y] = {{X, Θ}, Y}.  Endomorphisms of E are 2d×2d matrices
acting on coordinates ordered (A-block, A*-block).  Bilinear brackets are
stored as :class:`TrilinearTensor` values indexed (input, input, output).

A skew endomorphism I is represented by the degree-2 function with
I(u) = {u, I_fun}; with that convention Θ_I = {I_fun, Θ} has derived bracket
[IX, Y] + [X, IY] - I[X, Y].
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import NamedTuple, Optional, Union

import numpy as np

from . import linalg
from .errors import DegreeError, DimensionMismatchError, InternalConsistencyError, SkewnessError
from .gca import (
    Bidegree,
    BasisSpec,
    GradedElement,
    big_bracket,
    coordinates,
    monomial_masks,
    section,
)
from .report import CheckReport, array_witness, element_json


def pairing_gram(basis: BasisSpec) -> np.ndarray:
    """Gram matrix [[0, I], [I, 0]] of the split pairing on E."""
    d = basis.dim
    z, i = linalg.zeros(d, d), linalg.eye(d)
    return linalg.block([[z, i], [i, z]])


# -- structures ------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class CourantStructure:
    theta: GradedElement

    def __post_init__(self):
        bad = self.theta.degrees() - {3}
        if bad:
            raise DegreeError(f"a pre-Courant structure has total degree 3; found degrees {sorted(bad)}")

    @classmethod
    def from_parts(cls, basis: BasisSpec, mu=None, gamma=None, phi=None, psi=None) -> "CourantStructure":
        total = GradedElement.zero(basis)
        for part, bd in ((mu, (1, 2)), (gamma, (2, 1)), (phi, (0, 3)), (psi, (3, 0))):
            if part is None:
                continue
            if part.component(bd) != part:
                raise DegreeError(f"component expected in bidegree {bd}")
            total = total + part
        return cls(total)

    @classmethod
    def zero(cls, basis: BasisSpec) -> "CourantStructure":
        return cls(GradedElement.zero(basis))

    @property
    def basis(self) -> BasisSpec:
        return self.theta.basis

    @property
    def mu(self) -> GradedElement:
        return self.theta.component((1, 2))

    @property
    def gamma(self) -> GradedElement:
        return self.theta.component((2, 1))

    @property
    def phi(self) -> GradedElement:
        return self.theta.component((0, 3))

    @property
    def psi(self) -> GradedElement:
        return self.theta.component((3, 0))

    def components(self) -> dict[str, GradedElement]:
        return {"mu": self.mu, "gamma": self.gamma, "phi": self.phi, "psi": self.psi}

    def __add__(self, other: "CourantStructure") -> "CourantStructure":
        return CourantStructure(self.theta + other.theta)

    def __eq__(self, other) -> bool:
        if not isinstance(other, CourantStructure):
            return NotImplemented
        return self.theta == other.theta

    def scale(self, c) -> "CourantStructure":
        return CourantStructure(self.theta.scale(c))

    @cached_property
    def bracket(self) -> "TrilinearTensor":
        return bracket_tensor(self)


def anchor_action(theta: CourantStructure, X: GradedElement, f) -> Fraction:
    """ρ(X)·f.  Over a point every function is constant, so this is always 0."""
    value = big_bracket(big_bracket(X, theta.theta), GradedElement.scalar(theta.basis, f))
    return value.coefficient(0)


# -- endomorphisms ----------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class Endomorphism:
    basis: BasisSpec
    matrix: np.ndarray

    def __post_init__(self):
        n = self.basis.size
        m = linalg.as_frac_array(self.matrix)
        if m.shape != (n, n):
            raise DimensionMismatchError(f"expected a {n}x{n} matrix, got {m.shape}")
        object.__setattr__(self, "matrix", linalg.freeze(m))

    @classmethod
    def identity(cls, basis: BasisSpec) -> "Endomorphism":
        return cls(basis, linalg.eye(basis.size))

    @classmethod
    def zero(cls, basis: BasisSpec) -> "Endomorphism":
        return cls(basis, linalg.zeros(basis.size, basis.size))

    @classmethod
    def from_blocks(cls, basis: BasisSpec, aa=None, a_from_dual=None, dual_from_a=None, dualdual=None):
        """Assemble [[aa, a_from_dual], [dual_from_a, dualdual]]; missing blocks are zero."""
        d = basis.dim
        blocks = [linalg.zeros(d, d) if b is None else linalg.as_frac_array(b)
                  for b in (aa, a_from_dual, dual_from_a, dualdual)]
        return cls(basis, linalg.block([[blocks[0], blocks[1]], [blocks[2], blocks[3]]]))

    def blocks(self) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
        d = self.basis.dim
        m = self.matrix
        return m[:d, :d], m[:d, d:], m[d:, :d], m[d:, d:]

    def _check(self, other: "Endomorphism"):
        if other.basis.dim != self.basis.dim:
            raise DimensionMismatchError(f"dimension {self.basis.dim} vs {other.basis.dim}")

    def __matmul__(self, other: "Endomorphism") -> "Endomorphism":
        self._check(other)
        return Endomorphism(self.basis, linalg.matmul(self.matrix, other.matrix))

    def __add__(self, other: "Endomorphism") -> "Endomorphism":
        self._check(other)
        return Endomorphism(self.basis, self.matrix + other.matrix)

    def __sub__(self, other: "Endomorphism") -> "Endomorphism":
        self._check(other)
        return Endomorphism(self.basis, self.matrix - other.matrix)

    def __neg__(self) -> "Endomorphism":
        return Endomorphism(self.basis, -self.matrix)

    def scale(self, c) -> "Endomorphism":
        return Endomorphism(self.basis, self.matrix * Fraction(c))

    def __mul__(self, c):
        if isinstance(c, (int, Fraction)) and not isinstance(c, bool):
            return self.scale(c)
        return NotImplemented

    __rmul__ = __mul__

    def __eq__(self, other) -> bool:
        if not isinstance(other, Endomorphism):
            return NotImplemented
        return self.basis.dim == other.basis.dim and linalg.equal(self.matrix, other.matrix)

    def square(self) -> "Endomorphism":
        return self @ self

    def is_scalar(self, lam) -> bool:
        return self == Endomorphism.identity(self.basis).scale(lam)

    def square_scalar(self) -> Optional[Fraction]:
        """λ with I² = λ·id_E, or None."""
        sq = self.square().matrix
        lam = sq[0, 0]
        return lam if linalg.equal(sq, linalg.eye(self.basis.size) * lam) else None

    def apply(self, u: GradedElement) -> GradedElement:
        return section(self.basis, list(self.matrix @ np.array(coordinates(u), dtype=object)))

    def transpose(self) -> "Endomorphism":
        return transpose_endo(self)

    def __repr__(self) -> str:
        rows = ["[" + " ".join(str(x) for x in row) + "]" for row in self.matrix]
        return f"Endomorphism(dim={self.basis.dim}, " + " ".join(rows) + ")"


def transpose_endo(m: Endomorphism) -> Endomorphism:
    """I* with ⟨I* u, v⟩ = ⟨u, I v⟩ for the split pairing (Gram conjugation)."""
    p = pairing_gram(m.basis)
    return Endomorphism(m.basis, p @ m.matrix.T @ p)


def is_skew(m: Endomorphism) -> bool:
    return transpose_endo(m) == -m


def is_symmetric(m: Endomorphism) -> bool:
    return transpose_endo(m) == m


def is_orthogonal(m: Endomorphism) -> bool:
    return m @ transpose_endo(m) == Endomorphism.identity(m.basis)


def skewness_defect(m: Endomorphism):
    """First basis pair (u, v) with ⟨m u, v⟩ + ⟨u, m v⟩ ≠ 0, or None."""
    p = pairing_gram(m.basis)
    form = m.matrix.T @ p  # form[u, v] = ⟨m e_u, e_v⟩
    defect = form + form.T
    hit = linalg.first_nonzero(defect)
    return None if hit is None else hit[0]


def endo_from_function(e2: GradedElement) -> Endomorphism:
    """Matrix of u ↦ {u, e2} for a degree-2 element."""
    bad = e2.degrees() - {2}
    if bad:
        raise DegreeError(f"expected a degree-2 element, got degrees {sorted(bad)}")
    basis = e2.basis
    n = basis.size
    m = linalg.zeros(n, n)
    for k in range(n):
        image = big_bracket(GradedElement.generator(basis, k), e2)
        for mask, c in image.items():
            m[mask.bit_length() - 1, k] = c
    return Endomorphism(basis, m)


def function_from_skew_endo(m: Endomorphism) -> GradedElement:
    """Inverse of :func:`endo_from_function` on pairing-skew endomorphisms."""
    pair = skewness_defect(m)
    if pair is not None:
        u, v = pair
        raise SkewnessError(f"endomorphism is not skew: ⟨I e{u}, e{v}⟩ + ⟨e{u}, I e{v}⟩ ≠ 0", pair=(u, v))
    # e2 = Σ_{k<l} C[k,l] x_k x_l with C = -M·P
    c = -(m.matrix @ pairing_gram(m.basis))
    n = m.basis.size
    terms = {}
    for k in range(n):
        for l in range(k + 1, n):
            if c[k, l] != 0:
                terms[(1 << k) | (1 << l)] = c[k, l]
    return GradedElement(m.basis, terms)


# -- bilinear brackets as tensors ----------------------------------------------------


@dataclass(frozen=True, eq=False)
class TrilinearTensor:
    """A bilinear map E × E → E; ``entries[m, n, l]`` is the l-th coordinate of (e_m, e_n)."""

    basis: BasisSpec
    entries: np.ndarray

    def __post_init__(self):
        n = self.basis.size
        if self.entries.shape != (n, n, n):
            raise DimensionMismatchError(f"expected shape {(n, n, n)}, got {self.entries.shape}")
        linalg.freeze(self.entries)

    @classmethod
    def zero(cls, basis: BasisSpec) -> "TrilinearTensor":
        n = basis.size
        return cls(basis, linalg.zeros(n, n, n))

    def __add__(self, other: "TrilinearTensor") -> "TrilinearTensor":
        return TrilinearTensor(self.basis, self.entries + other.entries)

    def __sub__(self, other: "TrilinearTensor") -> "TrilinearTensor":
        return TrilinearTensor(self.basis, self.entries - other.entries)

    def __neg__(self) -> "TrilinearTensor":
        return TrilinearTensor(self.basis, -self.entries)

    def scale(self, c) -> "TrilinearTensor":
        return TrilinearTensor(self.basis, self.entries * Fraction(c))

    def __eq__(self, other) -> bool:
        if not isinstance(other, TrilinearTensor):
            return NotImplemented
        return linalg.equal(self.entries, other.entries)

    def is_zero(self) -> bool:
        return linalg.is_zero(self.entries)

    def witness(self):
        """JSON-ready first nonzero entry (input, input, output), or None."""
        return array_witness(self.entries, kind="tensor-entry")

    def __call__(self, u: GradedElement, v: GradedElement) -> GradedElement:
        cu = np.array(coordinates(u), dtype=object)
        cv = np.array(coordinates(v), dtype=object)
        return section(self.basis, list(np.einsum("m,n,mnl->l", cu, cv, self.entries)))

    def precompose(self, i: Endomorphism, slot: int) -> "TrilinearTensor":
        """(u, v) ↦ B(Iu, v) for slot 0, B(u, Iv) for slot 1."""
        n = self.basis.size
        it = i.matrix.T
        if slot == 0:
            out = linalg.matmul(it, self.entries.reshape(n, n * n)).reshape(n, n, n)
        else:
            moved = self.entries.transpose(1, 0, 2).reshape(n, n * n)
            out = linalg.matmul(it, moved).reshape(n, n, n).transpose(1, 0, 2)
        return TrilinearTensor(self.basis, np.ascontiguousarray(out))

    def postcompose(self, i: Endomorphism) -> "TrilinearTensor":
        """(u, v) ↦ I B(u, v)."""
        n = self.basis.size
        out = linalg.matmul(self.entries.reshape(n * n, n), i.matrix.T).reshape(n, n, n)
        return TrilinearTensor(self.basis, out)


def bracket_tensor(theta: Union[CourantStructure, GradedElement]) -> TrilinearTensor:
    """Dorfman bracket of Θ on all pairs of basis sections."""
    element = theta.theta if isinstance(theta, CourantStructure) else theta
    basis = element.basis
    n = basis.size
    out = linalg.zeros(n, n, n)
    gens = [GradedElement.generator(basis, k) for k in range(n)]
    for m in range(n):
        left = big_bracket(gens[m], element)
        if left.is_zero():
            continue
        for k in range(n):
            for mask, c in big_bracket(left, gens[k]).items():
                out[m, k, mask.bit_length() - 1] = c
    return TrilinearTensor(basis, out)


def _tensor(theta) -> TrilinearTensor:
    if isinstance(theta, TrilinearTensor):
        return theta
    if isinstance(theta, CourantStructure):
        return theta.bracket
    return bracket_tensor(theta)


def _require_section(u: GradedElement, name: str):
    bad = u.degrees() - {1}
    if bad:
        raise DegreeError(f"{name} must be a section (degree 1), got degrees {sorted(bad)}")


def dorfman(theta: CourantStructure, X: GradedElement, Y: GradedElement) -> GradedElement:
    _require_section(X, "X")
    _require_section(Y, "Y")
    return big_bracket(big_bracket(X, theta.theta), Y)


def axioms_pre_courant(theta: CourantStructure) -> CheckReport:
    """Metricity axioms of the Dorfman bracket on all basis triples.

    Over a point the anchor vanishes, so both left-hand sides are zero.
    """
    report = CheckReport("pre-Courant axioms")
    b = theta.bracket.entries
    p = pairing_gram(theta.basis)
    # pair[m, n, z] = ⟨[e_m, e_n], e_z⟩
    pair = np.einsum("mnl,lz->mnz", b, p)
    first = pair + np.transpose(pair, (0, 2, 1))
    report.add("metric-compatibility", linalg.is_zero(first), array_witness(first, "basis-triple"),
               "⟨[X,Y],Z⟩ + ⟨Y,[X,Z]⟩ = ρ(X)⟨Y,Z⟩ = 0")
    sym = b + np.transpose(b, (1, 0, 2))  # [Y,Z] + [Z,Y], indexed (Y, Z, out)
    second = np.einsum("ynl,lx->xyn", sym, p)
    report.add("symmetric-part", linalg.is_zero(second), array_witness(second, "basis-triple"),
               "⟨X,[Y,Z]+[Z,Y]⟩ = ρ(X)⟨Y,Z⟩ = 0")
    return report


class CourantVerdict(NamedTuple):
    is_courant: bool
    witness: GradedElement


def is_courant(theta: CourantStructure) -> CourantVerdict:
    square = big_bracket(theta.theta, theta.theta)
    return CourantVerdict(square.is_zero(), square)


def _require_degree2(e: GradedElement):
    bad = e.degrees() - {2}
    if bad:
        raise DegreeError(f"deformation needs a degree-2 element, got degrees {sorted(bad)}")


def deform(theta: CourantStructure, i_fun: GradedElement) -> CourantStructure:
    """Θ_I = {I, Θ}."""
    _require_degree2(i_fun)
    return CourantStructure(big_bracket(i_fun, theta.theta))


def deform2(theta: CourantStructure, i_fun: GradedElement, j_fun: GradedElement) -> CourantStructure:
    """Θ_{I,J} = {J, {I, Θ}}."""
    return deform(deform(theta, i_fun), j_fun)


def deform_tensor(b: TrilinearTensor, i: Endomorphism) -> TrilinearTensor:
    """[X, Y]_I = [IX, Y] + [X, IY] - I[X, Y]."""
    return b.precompose(i, 0) + b.precompose(i, 1) - b.postcompose(i)


def deformed_bracket(theta, i: Endomorphism) -> TrilinearTensor:
    return deform_tensor(_tensor(theta), i)


def deformed_bracket2(theta, i: Endomorphism, j: Endomorphism) -> TrilinearTensor:
    return deform_tensor(deform_tensor(_tensor(theta), i), j)


def torsion_tensor(b: TrilinearTensor, i: Endomorphism) -> TrilinearTensor:
    """[IX, IY] - I([X, Y]_I) for an arbitrary bilinear bracket."""
    both = b.precompose(i, 0).precompose(i, 1)
    return both - deform_tensor(b, i).postcompose(i)


def nijenhuis_torsion(theta, i: Endomorphism, cross_check: bool = True) -> TrilinearTensor:
    """Nijenhuis torsion of ``i`` for the bracket of ``theta``.

    ``theta`` may be a CourantStructure, a degree-3 element, or a bracket
    tensor.  The result is cross-checked against ½([X,Y]_{I,I} - [X,Y]_{I²}),
    and, when I is skew with I² = λ id and Θ is an element, against the
    bracket of ½(Θ_{I,I} - λΘ).
    """
    b = _tensor(theta)
    t = torsion_tensor(b, i)
    if not cross_check:
        return t
    alt = (deform_tensor(deform_tensor(b, i), i) - deform_tensor(b, i.square())).scale(Fraction(1, 2))
    if alt != t:
        raise InternalConsistencyError("torsion disagrees with ½([X,Y]_{I,I} - [X,Y]_{I²})")
    if not isinstance(theta, TrilinearTensor):
        structure = theta if isinstance(theta, CourantStructure) else CourantStructure(theta)
        lam = i.square_scalar()
        if lam is not None and is_skew(i):
            via = torsion_by_deformation(structure, function_from_skew_endo(i), lam)
            if bracket_tensor(via) != t:
                raise InternalConsistencyError("torsion disagrees with ½(Θ_{I,I} - λΘ)")
    return t


def torsion_by_deformation(theta: CourantStructure, i_fun: GradedElement, lam) -> GradedElement:
    """The degree-3 element ½(Θ_{I,I} - λΘ)."""
    twice = deform2(theta, i_fun, i_fun).theta
    return (twice - theta.theta.scale(lam)).scale(Fraction(1, 2))


def concomitant(theta, i: Endomorphism, j: Endomorphism) -> TrilinearTensor:
    """C_Θ(I, J) = [·,·]_{I,J} + [·,·]_{J,I}."""
    b = _tensor(theta)
    return deform_tensor(deform_tensor(b, i), j) + deform_tensor(deform_tensor(b, j), i)


def concomitant_element(theta: CourantStructure, i_fun: GradedElement, j_fun: GradedElement) -> GradedElement:
    """Θ_{I,J} + Θ_{J,I} for skew I, J given by their functions."""
    return deform2(theta, i_fun, j_fun).theta + deform2(theta, j_fun, i_fun).theta


def anticommute(i: Endomorphism, j: Endomorphism) -> bool:
    return (i @ j + j @ i) == Endomorphism.zero(i.basis)


def degree3_basis(basis: BasisSpec) -> list[GradedElement]:
    """Monomial basis of the degree-3 elements, used to linearise conditions on Θ."""
    return [GradedElement(basis, {m: 1}) for m in monomial_masks(basis, 3)]


def element_witness(e: GradedElement):
    return None if e.is_zero() else element_json(e)


__all__ = [
    "Bidegree",
    "CourantStructure",
    "CourantVerdict",
    "Endomorphism",
    "TrilinearTensor",
    "anchor_action",
    "anticommute",
    "axioms_pre_courant",
    "bracket_tensor",
    "concomitant",
    "concomitant_element",
    "deform",
    "deform2",
    "deform_tensor",
    "deformed_bracket",
    "deformed_bracket2",
    "dorfman",
    "endo_from_function",
    "function_from_skew_endo",
    "is_courant",
    "is_orthogonal",
    "is_skew",
    "is_symmetric",
    "nijenhuis_torsion",
    "pairing_gram",
    "torsion_by_deformation",
    "torsion_tensor",
    "transpose_endo",
]
