"""Lie-algebra level structures on A and A*, and the equivalence verifiers.

Matrices: a 2-form is stored as ω♭ (A → A*), a bivector as π♯ (A* → A),
both d×d and skew.  Their degree-2 elements are the functions of the block
endomorphisms [[0, 0], [ω♭, 0]] and [[0, π♯], [0, 0]], so that
S_i(u) = {u, ω_i + ε_iπ_i} reproduces the block matrix [[0, ε_iπ♯], [ω♭, 0]].

The A*-side is handled by swapping the roles of θ and ξ: a structure γ on A*
becomes a structure on A, a bivector becomes a 2-form with the same matrix.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, NamedTuple, Optional, Sequence, Union

import numpy as np

from . import linalg
from .courant import (
    CourantStructure,
    Endomorphism,
    endo_from_function,
    function_from_skew_endo,
    is_courant,
)
from .errors import (
    DegreeError,
    InternalConsistencyError,
    PreconditionError,
    SingularError,
    SkewnessError,
    StructureConstantError,
)
from .gca import (
    BasisSpec,
    GradedElement,
    big_bracket,
    bidegree_masks,
    coordinates,
    swap_roles,
    theta,
    xi,
)
from .hyper import (
    HYPERSYMPLECTIC,
    INDICES,
    EpsilonTriple,
    HyperTriple,
    check_eps_hypersymplectic,
    metric,
    next_,
    prev,
    transition,
)
from .report import CheckReport, array_witness, element_json

HALF = Fraction(1, 2)


def _witness(e: GradedElement):
    return None if e.is_zero() else element_json(e)


# -- Lie structures -------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class LieStructure:
    """A bracket on A (element of bidegree (1,2)) or on A* (bidegree (2,1))."""

    basis: BasisSpec
    element: GradedElement
    side: str = "A"

    def __post_init__(self):
        if self.side not in ("A", "A*"):
            raise ValueError(f"side must be 'A' or 'A*', got {self.side!r}")
        want = (1, 2) if self.side == "A" else (2, 1)
        if self.element.component(want) != self.element:
            raise DegreeError(f"a structure on {self.side} has bidegree {want}")

    @property
    def mu(self) -> GradedElement:
        return self.element

    def swapped(self) -> "LieStructure":
        return LieStructure(self.basis, swap_roles(self.element), "A*" if self.side == "A" else "A")

    def as_a_side(self) -> "LieStructure":
        return self if self.side == "A" else self.swapped()

    def constants(self) -> np.ndarray:
        """c[a, b, c] with [e_b, e_c] = Σ_a c[a, b, c] e_a (0-based), read back from the element."""
        mu = self.as_a_side().element
        d = self.basis.dim
        out = linalg.zeros(d, d, d)
        for b in range(d):
            left = big_bracket(theta(self.basis, b + 1), mu)
            for c in range(d):
                image = coordinates(big_bracket(left, theta(self.basis, c + 1)))
                for a in range(d):
                    out[a, b, c] = image[a]
        return out

    def is_lie(self) -> bool:
        return big_bracket(self.element, self.element).is_zero()

    def courant(self) -> CourantStructure:
        return CourantStructure(self.element)


def constants_array(dim: int, table) -> np.ndarray:
    """Normalise a table of (a, b, c, r) entries, meaning [e_b, e_c] = r e_a (1-based).

    A missing (c, b) entry is filled by antisymmetry; an explicit one must agree.
    """
    if isinstance(table, np.ndarray):
        c = linalg.as_frac_array(table)
        if c.shape != (dim, dim, dim):
            raise StructureConstantError(f"constant array has shape {c.shape}, expected {(dim,) * 3}")
    else:
        c = linalg.zeros(dim, dim, dim)
        given = {}
        for entry in table:
            a, b, cc, r = entry
            for idx in (a, b, cc):
                if not (isinstance(idx, int) and 1 <= idx <= dim):
                    raise StructureConstantError(f"index {idx!r} out of range 1..{dim}")
            key = (a - 1, b - 1, cc - 1)
            if key in given:
                raise StructureConstantError(f"duplicate entry for [e{b}, e{cc}] along e{a}")
            given[key] = linalg.to_fraction(r)
        for (a, b, cc), r in given.items():
            mirror = given.get((a, cc, b))
            if mirror is not None and mirror != -r:
                raise StructureConstantError(f"[e{b+1}, e{cc+1}] and [e{cc+1}, e{b+1}] are not opposite along e{a+1}")
            c[a, b, cc] = r
            c[a, cc, b] = -r
    for a in range(dim):
        for b in range(dim):
            for cc in range(dim):
                if c[a, b, cc] != -c[a, cc, b]:
                    raise StructureConstantError(f"constants not antisymmetric at ({a+1}, {b+1}, {cc+1})")
    return c


def classical_jacobi_defect(c: np.ndarray) -> np.ndarray:
    """J[e, x, y, z] = Σ_cyclic [[e_x, e_y], e_z] along e_e."""
    # [[e_x, e_y], e_z] = Σ_a c[a,x,y] [e_a, e_z] = Σ_a c[a,x,y] c[e,a,z]
    t = np.einsum("axy,eaz->exyz", c, c)
    return t + np.transpose(t, (0, 2, 3, 1)) + np.transpose(t, (0, 3, 1, 2))


def lie_from_constants(basis: Union[BasisSpec, int], table, require_jacobi: bool = False) -> LieStructure:
    """μ = -Σ_{b<c} c^a_{bc} θ^a ξ_b ξ_c, whose derived bracket is [e_b, e_c] = c^a_{bc} e_a."""
    if isinstance(basis, int):
        basis = BasisSpec(basis)
    d = basis.dim
    c = constants_array(d, table)
    terms = {}
    for a in range(d):
        for b in range(d):
            for cc in range(b + 1, d):
                if c[a, b, cc] != 0:
                    mask = (1 << a) | (1 << (d + b)) | (1 << (d + cc))
                    terms[mask] = -c[a, b, cc]
    lie = LieStructure(basis, GradedElement(basis, terms))
    classical = linalg.is_zero(classical_jacobi_defect(c))
    if classical != lie.is_lie():
        raise InternalConsistencyError("Jacobi via {μ, μ} disagrees with the classical Jacobi sum")
    if require_jacobi and not classical:
        raise StructureConstantError("structure constants violate the Jacobi identity")
    return lie


def abelian(basis: Union[BasisSpec, int]) -> LieStructure:
    return lie_from_constants(basis, [])


# -- forms and bivectors -------------------------------------------------------------------


def _skew_matrix(m, what: str) -> np.ndarray:
    m = linalg.as_frac_array(m)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError(f"{what} must be a square matrix, got shape {m.shape}")
    if not linalg.is_skew(m):
        hit = linalg.first_nonzero(m + m.T)
        raise SkewnessError(f"{what} is not skew at entry {tuple(int(i) + 1 for i in hit[0])}", pair=hit[0])
    return linalg.freeze(m)


@dataclass(frozen=True, eq=False)
class TwoForm:
    matrix: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "matrix", _skew_matrix(self.matrix, "2-form"))

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def is_nondegenerate(self) -> bool:
        return linalg.det(self.matrix) != 0

    def element(self, basis: Optional[BasisSpec] = None) -> GradedElement:
        basis = basis or BasisSpec(self.dim)
        return function_from_skew_endo(Endomorphism.from_blocks(basis, dual_from_a=self.matrix))

    def __eq__(self, other) -> bool:
        return isinstance(other, TwoForm) and linalg.equal(self.matrix, other.matrix)


@dataclass(frozen=True, eq=False)
class Bivector:
    matrix: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "matrix", _skew_matrix(self.matrix, "bivector"))

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def element(self, basis: Optional[BasisSpec] = None) -> GradedElement:
        basis = basis or BasisSpec(self.dim)
        return function_from_skew_endo(Endomorphism.from_blocks(basis, a_from_dual=self.matrix))

    def __eq__(self, other) -> bool:
        return isinstance(other, Bivector) and linalg.equal(self.matrix, other.matrix)


def invert_form(w: TwoForm) -> Bivector:
    """π with π♯ ∘ ω♭ = id_A."""
    try:
        inv = linalg.inverse(w.matrix)
    except SingularError:
        raise SingularError("2-form is degenerate") from None
    if not linalg.is_skew(inv):
        raise InternalConsistencyError("inverse of a skew matrix is not skew")
    return Bivector(inv)


@dataclass(frozen=True, eq=False)
class FormTriple:
    omegas: tuple[TwoForm, TwoForm, TwoForm]
    pis: tuple[Bivector, Bivector, Bivector]
    eps: EpsilonTriple

    @classmethod
    def build(cls, omegas: Sequence, eps: EpsilonTriple, pis: Optional[Sequence] = None) -> "FormTriple":
        """Wrap raw matrices; missing bivectors are taken to be the inverses."""
        ws = tuple(w if isinstance(w, TwoForm) else TwoForm(w) for w in omegas)
        if pis is None:
            ps = tuple(invert_form(w) for w in ws)
        else:
            ps = tuple(p if isinstance(p, Bivector) else Bivector(p) for p in pis)
        return cls(ws, ps, eps)

    def __post_init__(self):
        if len(self.omegas) != 3 or len(self.pis) != 3:
            raise ValueError("a form triple has exactly three 2-forms and three bivectors")
        dims = {x.dim for x in (*self.omegas, *self.pis)}
        if len(dims) != 1:
            raise ValueError(f"forms of different sizes: {sorted(dims)}")

    @property
    def dim(self) -> int:
        return self.omegas[0].dim

    @property
    def basis(self) -> BasisSpec:
        return BasisSpec(self.dim)

    def w(self, i: int) -> np.ndarray:
        return self.omegas[(i - 1) % 3].matrix

    def p(self, i: int) -> np.ndarray:
        return self.pis[(i - 1) % 3].matrix

    def omega(self, i: int) -> TwoForm:
        return self.omegas[(i - 1) % 3]

    def pi(self, i: int) -> Bivector:
        return self.pis[(i - 1) % 3]

    def inverse_ok(self, i: int) -> bool:
        return linalg.equal(self.p(i) @ self.w(i), linalg.eye(self.dim))

    def swapped(self) -> "FormTriple":
        """The same data seen from A*: bivectors become 2-forms and vice versa."""
        return FormTriple(tuple(TwoForm(p.matrix) for p in self.pis),
                          tuple(Bivector(w.matrix) for w in self.omegas), self.eps)

    def with_eps(self, eps: EpsilonTriple) -> "FormTriple":
        return FormTriple(self.omegas, self.pis, eps)


def transition_N(t: FormTriple, i: int) -> np.ndarray:
    """N_i = π♯_{i-1} ∘ ω♭_{i+1}."""
    return t.p(prev(i)) @ t.w(next_(i))


def n_squared_ok(t: FormTriple, i: int) -> bool:
    n = transition_N(t, i)
    return linalg.equal(n @ n, linalg.eye(t.dim) * t.eps[i])


def embed_transition(t: FormTriple, i: int) -> Endomorphism:
    """diag(N_i, ε₁ε₂ε₃ N_i*) on E."""
    n = transition_N(t, i)
    return Endomorphism.from_blocks(t.basis, aa=n, dualdual=n.T * t.eps.product)


def metric_g(t: FormTriple) -> np.ndarray:
    """g♭ = ε_{i-1}ε_{i+1} ω♭_{i-1} ∘ π♯_i ∘ ω♭_{i+1}, checked for all i."""
    values = {}
    for i in INDICES:
        p, n = prev(i), next_(i)
        values[i] = t.w(p) @ t.p(i) @ t.w(n) * (t.eps[p] * t.eps[n])
    for i in (2, 3):
        if not linalg.equal(values[1], values[i]):
            raise InternalConsistencyError(f"cyclic expressions for g disagree between i=1 and i={i}")
    g = values[1]
    if not linalg.equal(g.T, g * (-t.eps.product)):
        raise InternalConsistencyError("g does not satisfy its transpose law")
    return g


def embed_metric(t: FormTriple) -> Endomorphism:
    g = metric_g(t)
    return Endomorphism.from_blocks(t.basis, a_from_dual=linalg.inverse(g), dual_from_a=g)


def build_S(w: TwoForm, p: Bivector, eps_i: int, basis: Optional[BasisSpec] = None) -> Endomorphism:
    """[[0, ε_iπ♯], [ω♭, 0]], cross-checked against the function ω + ε_iπ."""
    basis = basis or BasisSpec(w.dim)
    s = Endomorphism.from_blocks(basis, a_from_dual=p.matrix * eps_i, dual_from_a=w.matrix)
    fun = w.element(basis) + p.element(basis).scale(eps_i)
    if endo_from_function(fun) != s:
        raise InternalConsistencyError("block form of S disagrees with the function ω + επ")
    return s


def assemble(t: FormTriple) -> HyperTriple:
    basis = t.basis
    funs = tuple(t.omega(i).element(basis) + t.pi(i).element(basis).scale(t.eps[i]) for i in INDICES)
    return HyperTriple(*(build_S(t.omega(i), t.pi(i), t.eps[i], basis) for i in INDICES), eps=t.eps, functions=funs)


def block_report(t: FormTriple) -> CheckReport:
    """The E-level T_i and G of the assembled triple agree with the A-level N_i and g."""
    report = CheckReport("block forms")
    h = assemble(t)
    for i in INDICES:
        report.add(f"T{i} = diag(N{i}, e N{i}*)", transition(h, i) == embed_transition(t, i))
    report.add("G = [[0, g^-1], [g, 0]]", metric(h) == embed_metric(t))
    return report


# -- Lie-level checks ---------------------------------------------------------------------


def _lie_checked(mu: LieStructure) -> LieStructure:
    if not mu.is_lie():
        raise PreconditionError("structure is not a Lie bracket: {μ, μ} ≠ 0")
    return mu.as_a_side()


def differential(mu: LieStructure, w: TwoForm) -> GradedElement:
    """{μ, ω}, a bidegree (0,3) element; zero iff ω is closed."""
    mu = mu.as_a_side()
    return big_bracket(mu.element, w.element(mu.basis))


def schouten_square(mu: LieStructure, p: Bivector) -> GradedElement:
    """{π, {π, μ}}, the Schouten square expressed through nested big brackets."""
    mu = _lie_checked(mu)
    pe = p.element(mu.basis)
    return big_bracket(pe, big_bracket(pe, mu.element))


def is_weak_poisson(mu: LieStructure, p: Bivector) -> bool:
    return big_bracket(mu.as_a_side().element, schouten_square(mu, p)).is_zero()


def check_eps_hyper_lie(mu: LieStructure, t: FormTriple) -> CheckReport:
    mu = _lie_checked(mu)
    report = CheckReport("eps-hypersymplectic on A")
    basis = mu.basis
    for i in INDICES:
        w, p = t.omega(i), t.pi(i)
        nondeg = w.is_nondegenerate()
        inverse = t.inverse_ok(i)
        d_omega = differential(mu, w)
        pe = p.element(basis)
        square = big_bracket(pe, big_bracket(pe, mu.element))
        report.add(f"omega{i} nondegenerate", nondeg)
        report.add(f"pi{i} inverse of omega{i}", inverse,
                   array_witness(t.p(i) @ t.w(i) - linalg.eye(t.dim), "matrix-entry"))
        report.add(f"omega{i} closed", d_omega.is_zero(), _witness(d_omega))
        report.add(f"pi{i} Poisson", square.is_zero(), _witness(square))
        if inverse and d_omega.is_zero() != square.is_zero():
            raise InternalConsistencyError(f"closedness of ω{i} and Poisson property of its inverse disagree")
        n = transition_N(t, i)
        diff = n @ n - linalg.eye(t.dim) * t.eps[i]
        report.add(f"N{i}^2 = eps{i} id", linalg.is_zero(diff), array_witness(diff, "matrix-entry"))
    return report


# -- torsion structures -----------------------------------------------------------------------


def trilinear_values(phi: GradedElement) -> np.ndarray:
    """F[x, y, z] = {e_z, {e_y, {e_x, φ}}} for a (0,3) element, on the A-basis."""
    basis = phi.basis
    d = basis.dim
    out = linalg.zeros(d, d, d)
    gens = [theta(basis, a + 1) for a in range(d)]
    for x in range(d):
        one = big_bracket(gens[x], phi)
        if one.is_zero():
            continue
        for y in range(d):
            two = big_bracket(gens[y], one)
            for z in range(d):
                out[x, y, z] = big_bracket(gens[z], two).coefficient(0)
    return out


def pulled_back_differential(mu: LieStructure, t: FormTriple, i: int) -> np.ndarray:
    """(N_i dω_i)(X, Y, Z) = dω_i(N_iX, N_iY, N_iZ) on basis triples."""
    f = trilinear_values(differential(mu, t.omega(i)))
    n = transition_N(t, i)
    return np.einsum("ax,by,cz,abc->xyz", n, n, n, f)


def check_hyper_with_torsion(mu: LieStructure, t: FormTriple) -> CheckReport:
    """Hypersymplectic with torsion, by the pulled-back differentials and by Schouten squares."""
    if t.eps != HYPERSYMPLECTIC:
        raise PreconditionError(f"torsion structures use signs (-1, -1, -1), got {t.eps}")
    mu = _lie_checked(mu)
    report = CheckReport("hypersymplectic with torsion")
    for i in INDICES:
        report.add(f"pi{i} inverse of omega{i}", t.inverse_ok(i))
    for i in INDICES:
        report.add(f"N{i}^2 = -id", n_squared_ok(t, i))
    pulled = {i: pulled_back_differential(mu, t, i) for i in INDICES}
    direct = all(linalg.equal(pulled[1], pulled[i]) for i in (2, 3))
    report.add("N1 dw1 = N2 dw2 = N3 dw3", direct,
               None if direct else array_witness(pulled[1] - (pulled[2] if not linalg.equal(pulled[1], pulled[2]) else pulled[3]), "basis-triple"))
    squares = {i: schouten_square(mu, t.pi(i)) for i in INDICES}
    algebraic = squares[1] == squares[2] == squares[3]
    report.add("[pi1,pi1] = [pi2,pi2] = [pi3,pi3]", algebraic,
               None if algebraic else _witness(squares[1] - squares[2] if squares[1] != squares[2] else squares[1] - squares[3]))
    if direct != algebraic:
        report.notes.append("anomaly: pulled-back differentials and Schouten squares disagree")
    return report


def build_psi(mu: LieStructure, p: Bivector) -> GradedElement:
    """ψ = ½{π, {π, μ}}, checked against the spelling -½{π, {μ, π}}."""
    mu = mu.as_a_side()
    pe = p.element(mu.basis)
    psi = big_bracket(pe, big_bracket(pe, mu.element)).scale(HALF)
    other = big_bracket(pe, big_bracket(mu.element, pe)).scale(-HALF)
    if psi != other:
        raise InternalConsistencyError("the two spellings of ψ disagree")
    return psi


def _gamma_element(gamma: Union[LieStructure, GradedElement]) -> GradedElement:
    if isinstance(gamma, LieStructure):
        return gamma.element if gamma.side == "A*" else swap_roles(gamma.element)
    if gamma.component((2, 1)) != gamma:
        raise DegreeError("γ must have bidegree (2,1)")
    return gamma


def build_phi(gamma: Union[LieStructure, GradedElement], w: TwoForm) -> GradedElement:
    """φ = ½{ω, {ω, γ}}, checked against -½{ω, {γ, ω}}."""
    g = _gamma_element(gamma)
    we = w.element(g.basis)
    phi = big_bracket(we, big_bracket(we, g)).scale(HALF)
    other = big_bracket(we, big_bracket(g, we)).scale(-HALF)
    if phi != other:
        raise InternalConsistencyError("the two spellings of φ disagree")
    return phi


def lemma_9_2_verify(mu: LieStructure, gamma, psi: GradedElement, phi: GradedElement,
                     w: TwoForm, p: Bivector) -> CheckReport:
    mu_el = mu.as_a_side().element
    gamma_el = _gamma_element(gamma)
    basis = mu_el.basis
    report = CheckReport("bracket lemma")
    double = mu_el + gamma_el
    report.add("precondition: Lie bialgebroid", big_bracket(double, double).is_zero())
    report.add("precondition: pi inverse of omega",
               linalg.equal(p.matrix @ w.matrix, linalg.eye(basis.dim)))
    we, pe = w.element(basis), p.element(basis)
    br = big_bracket
    i_left = br(pe, br(pe, mu_el)) == psi.scale(2)
    i_right = br(pe, br(we, mu_el)).scale(2) == br(we, br(we, psi))
    ii_left = br(we, br(we, gamma_el)) == phi.scale(2)
    ii_right = br(we, br(pe, gamma_el)).scale(2) == br(pe, br(pe, phi))
    report.add("i: sides agree", i_left == i_right, detail=f"left={i_left}, right={i_right}")
    report.add("ii: sides agree", ii_left == ii_right, detail=f"left={ii_left}, right={ii_right}")
    report.notes.append(f"i: {i_left}/{i_right}; ii: {ii_left}/{ii_right}")
    return report


def induced_dual_structure(mu: LieStructure, p: Bivector) -> LieStructure:
    """μ_π = {π, μ} on A*, certified by {μ + μ_π, μ + μ_π} = 0."""
    mu = _lie_checked(mu)
    if not schouten_square(mu, p).is_zero():
        raise PreconditionError("bivector is not Poisson")
    mu_pi = big_bracket(p.element(mu.basis), mu.element)
    total = mu.element + mu_pi
    if not big_bracket(total, total).is_zero():
        raise InternalConsistencyError("μ + μ_π is not a Lie bialgebroid double")
    return LieStructure(mu.basis, mu_pi, "A*")


# -- the equivalence theorems -----------------------------------------------------------------


class PotentialSolution(NamedTuple):
    solvable: bool
    kernel_dim: int
    psi: Optional[GradedElement]
    phi: Optional[GradedElement]


def solve_potentials(base: GradedElement, h: HyperTriple, with_phi: bool) -> PotentialSolution:
    """Find ψ (and φ) with Θ_{S_i,S_i} = ε_iΘ for Θ = base + ψ (+ φ), for all i.

    The condition is affine in (ψ, φ), so this is an exact linear solve.
    Returns the particular solution with free variables set to zero.
    """
    basis = base.basis
    masks = list(bidegree_masks(basis, 3, 0))
    n_psi = len(masks)
    if with_phi:
        masks += list(bidegree_masks(basis, 0, 3))
    funs = [h.function(i) for i in INDICES]
    rows_masks = sorted({m for p in range(4) for m in bidegree_masks(basis, p, 3 - p)})
    index = {m: k for k, m in enumerate(rows_masks)}

    def residual(el: GradedElement) -> np.ndarray:
        out = linalg.zeros(3 * len(rows_masks))
        for k, i in enumerate(INDICES):
            f = funs[k]
            r = big_bracket(f, big_bracket(f, el)) - el.scale(h.eps[i])
            for m, c in r.items():
                out[k * len(rows_masks) + index[m]] += c
        return out

    const = residual(base)
    cols = [residual(GradedElement(basis, {m: 1})) for m in masks]
    a = np.stack(cols, axis=1) if cols else linalg.zeros(len(const), 0)
    aug = np.hstack([a, (-const).reshape(-1, 1)])
    red, pivots = linalg.rref(aug)
    ncols = len(masks)
    if ncols in pivots:
        return PotentialSolution(False, ncols - len(pivots), None, None)
    x = linalg.zeros(ncols)
    for r, pc in enumerate(pivots):
        x[pc] = red[r, ncols]
    kernel = ncols - len(pivots)
    psi_terms, phi_terms = {}, {}
    for k, m in enumerate(masks):
        if x[k] != 0:
            (psi_terms if k < n_psi else phi_terms)[m] = x[k]
    psi = GradedElement(basis, psi_terms)
    phi = GradedElement(basis, phi_terms) if with_phi else None
    return PotentialSolution(True, kernel, psi, phi)


@dataclass
class EquivalenceReport:
    theorem: str
    left: CheckReport
    right: CheckReport
    notes: list[str] = field(default_factory=list)

    @property
    def left_holds(self) -> bool:
        return self.left.passed

    @property
    def right_holds(self) -> bool:
        return self.right.passed

    @property
    def agree(self) -> bool:
        return self.left.passed == self.right.passed

    def to_dict(self) -> dict:
        out = {
            "theorem": self.theorem,
            "left": self.left.to_dict(),
            "right": self.right.to_dict(),
            "left_holds": self.left_holds,
            "right_holds": self.right_holds,
            "agree": self.agree,
        }
        if self.notes:
            out["notes"] = list(self.notes)
        return out

    def lines(self) -> list[str]:
        head = (f"{self.theorem}: left {'holds' if self.left_holds else 'fails'}, "
                f"right {'holds' if self.right_holds else 'fails'} -> "
                f"{'AGREE' if self.agree else 'DISAGREE'}")
        return [head, *("  " + s for s in self.left.lines()), *("  " + s for s in self.right.lines()),
                *(f"  note: {n}" for n in self.notes)]

    def __str__(self) -> str:
        return "\n".join(self.lines())


@dataclass(frozen=True)
class TheoremInputs:
    mu: LieStructure
    forms: FormTriple
    gamma: Optional[LieStructure] = None


THEOREMS = ("thm7_2", "thm8_1", "cor8_2", "prop9_3", "thm9_4", "prop9_5", "thm9_6")


def _e_level(theta: GradedElement, h: HyperTriple, title: str) -> CheckReport:
    report = CheckReport(title)
    report.extend(check_eps_hypersymplectic(CourantStructure(theta), h))
    return report


def _need_gamma(inputs: TheoremInputs) -> GradedElement:
    if inputs.gamma is None:
        raise PreconditionError("this theorem needs a structure on A*")
    g = _gamma_element(inputs.gamma)
    total = inputs.mu.as_a_side().element + g
    if not big_bracket(total, total).is_zero():
        raise PreconditionError("(μ, γ) is not a Lie bialgebroid: {μ+γ, μ+γ} ≠ 0")
    return g


def _dual_side(gamma: GradedElement, t: FormTriple) -> tuple[LieStructure, FormTriple]:
    return LieStructure(gamma.basis, swap_roles(gamma)), t.swapped()


def _exists_potential(report: CheckReport, base: GradedElement, h: HyperTriple, with_phi: bool,
                      courant: bool, expected: tuple) -> Optional[GradedElement]:
    sol = solve_potentials(base, h, with_phi)
    report.add("potential exists", sol.solvable, detail=f"kernel dimension {sol.kernel_dim}")
    if not sol.solvable:
        return None
    theta = base + sol.psi + (sol.phi if with_phi else GradedElement.zero(base.basis))
    if sol.kernel_dim:
        report.notes.append(f"potential not unique (kernel dimension {sol.kernel_dim}); checked the particular solution")
    else:
        exp_psi, exp_phi = expected
        if exp_psi is not None and sol.psi != exp_psi:
            raise InternalConsistencyError("solved ψ differs from ½{π,{π,μ}}")
        if with_phi and exp_phi is not None and sol.phi != exp_phi:
            raise InternalConsistencyError("solved φ differs from ½{ω,{ω,γ}}")
    report.extend(check_eps_hypersymplectic(CourantStructure(theta), h))
    if courant:
        verdict = is_courant(CourantStructure(theta))
        report.add("Courant", verdict.is_courant, _witness(verdict.witness))
    return theta


def bialgebroid_expansion(mu: GradedElement, gamma: GradedElement, psi: GradedElement, phi: GradedElement) -> dict:
    """The brackets that must vanish for μ + γ + ψ + φ to be Courant, given a Lie bialgebroid.

    Each lands in its own bidegree, so {Θ, Θ} = 0 iff all five vanish; computing
    them separately gives a route that never forms {Θ, Θ}.
    """
    br = big_bracket
    return {
        "{gamma,phi}": br(gamma, phi),
        "{mu,psi}": br(mu, psi),
        "{psi,phi}": br(psi, phi),
        "{gamma,psi}": br(gamma, psi),
        "{mu,phi}": br(mu, phi),
    }


def theorem_suite(kind: str, inputs: TheoremInputs) -> EquivalenceReport:
    if kind not in THEOREMS:
        raise ValueError(f"unknown theorem {kind!r}; expected one of {', '.join(THEOREMS)}")
    mu = _lie_checked(inputs.mu)
    t = inputs.forms
    if t.dim != mu.basis.dim:
        raise PreconditionError(f"forms have dim {t.dim}, structure has dim {mu.basis.dim}")
    h = assemble(t)
    mu_el = mu.element
    notes: list[str] = []

    if kind == "thm7_2":
        left = check_eps_hyper_lie(mu, t)
        right = _e_level(mu_el, h, "eps-hypersymplectic on (A+A*, mu)")
        return EquivalenceReport(kind, left, right, notes)

    if kind == "thm8_1":
        gamma = _need_gamma(inputs)
        left = CheckReport("eps-hypersymplectic on A and on A*")
        left.extend(check_eps_hyper_lie(mu, t), "A: ")
        dual_mu, dual_t = _dual_side(gamma, t)
        left.extend(check_eps_hyper_lie(dual_mu, dual_t), "A*: ")
        right = _e_level(mu_el + gamma, h, "eps-hypersymplectic on (A+A*, mu+gamma)")
        return EquivalenceReport(kind, left, right, notes)

    if kind == "cor8_2":
        left = check_eps_hyper_lie(mu, t)
        right = CheckReport("eps-hypersymplectic on (A+A*, mu+mu_pi)")
        for i in INDICES:
            mu_pi = big_bracket(t.pi(i).element(mu.basis), mu_el)
            theta = mu_el + mu_pi
            verdict = is_courant(CourantStructure(theta))
            right.add(f"pi{i}: Courant", verdict.is_courant, _witness(verdict.witness))
            right.extend(check_eps_hypersymplectic(CourantStructure(theta), h), f"pi{i}: ")
        return EquivalenceReport(kind, left, right, notes)

    if t.eps != HYPERSYMPLECTIC:
        raise PreconditionError(f"{kind} concerns signs (-1, -1, -1), got {t.eps}")

    if kind in ("prop9_3", "thm9_4"):
        left = CheckReport("torsion structure on A")
        left.extend(check_hyper_with_torsion(mu, t))
        if kind == "thm9_4":
            for i in INDICES:
                left.add(f"pi{i} weak-Poisson", is_weak_poisson(mu, t.pi(i)))
        right = CheckReport("hypersymplectic on (A+A*, mu+psi)")
        psi = build_psi(mu, t.pi(1)) if t.inverse_ok(1) else None
        _exists_potential(right, mu_el, h, False, kind == "thm9_4", (psi, None))
        notes.extend(left.notes)
        return EquivalenceReport(kind, left, right, notes)

    gamma = _need_gamma(inputs)
    dual_mu, dual_t = _dual_side(gamma, t)
    left = CheckReport("torsion structures on A and A*")
    left.extend(check_hyper_with_torsion(mu, t), "A: ")
    left.extend(check_hyper_with_torsion(dual_mu, dual_t), "A*: ")
    psi = build_psi(mu, t.pi(1))
    phi = build_phi(gamma, t.omega(1))
    if kind == "thm9_6":
        br = big_bracket
        for name, value in (("{gamma,phi}", br(gamma, phi)), ("{mu,psi}", br(mu_el, psi)), ("{psi,phi}", br(psi, phi))):
            left.add(f"{name} = 0", value.is_zero(), _witness(value))
    right = CheckReport("hypersymplectic on (A+A*, mu+gamma+psi+phi)")
    theta = _exists_potential(right, mu_el + gamma, h, True, kind == "thm9_6", (psi, phi))
    if kind == "thm9_6":
        full = mu_el + gamma + psi + phi
        expansion = bialgebroid_expansion(mu_el, gamma, psi, phi)
        via_expansion = all(v.is_zero() for v in expansion.values())
        via_square = is_courant(CourantStructure(full)).is_courant
        if via_expansion != via_square:
            raise InternalConsistencyError("the five-bracket expansion disagrees with {Θ, Θ} = 0")
        notes.append("expansion: " + ", ".join(f"{k}={'0' if v.is_zero() else 'nonzero'}" for k, v in expansion.items()))
        notes.append(f"{{gamma,psi}} = 0: {big_bracket(gamma, psi).is_zero()}")
    notes.extend(left.notes)
    return EquivalenceReport(kind, left, right, notes)


__all__ = [
    "Bivector",
    "EquivalenceReport",
    "FormTriple",
    "LieStructure",
    "PotentialSolution",
    "THEOREMS",
    "TheoremInputs",
    "TwoForm",
    "abelian",
    "assemble",
    "block_report",
    "build_S",
    "build_phi",
    "build_psi",
    "check_eps_hyper_lie",
    "check_hyper_with_torsion",
    "classical_jacobi_defect",
    "constants_array",
    "differential",
    "embed_metric",
    "embed_transition",
    "bialgebroid_expansion",
    "induced_dual_structure",
    "invert_form",
    "is_weak_poisson",
    "lemma_9_2_verify",
    "lie_from_constants",
    "metric_g",
    "n_squared_ok",
    "pulled_back_differential",
    "schouten_square",
    "solve_potentials",
    "theorem_suite",
    "transition_N",
    "trilinear_values",
]
