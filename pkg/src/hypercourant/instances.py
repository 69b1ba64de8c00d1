"""Known-good and known-bad instances, random generators and searchers.

Everything here is a pure function of its arguments; randomness always comes
from a ``random.Random(seed)`` owned by the call.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable, Optional, Sequence

import numpy as np

from . import linalg
from .algebroid import (
    FormTriple,
    LieStructure,
    TwoForm,
    abelian,
    build_psi,
    check_hyper_with_torsion,
    classical_jacobi_defect,
    lie_from_constants,
    n_squared_ok,
    pulled_back_differential,
)
from .courant import (
    CourantStructure,
    Endomorphism,
    bracket_tensor,
    degree3_basis,
    endo_from_function,
    torsion_tensor,
    transpose_endo,
)
from .errors import GenerationError
from .gca import BasisSpec, GradedElement, big_bracket, bidegree_masks, monomial_masks, swap_roles
from .hyper import HYPERSYMPLECTIC, PARA_NORMAL, EpsilonTriple

# Left multiplication by i, j, k on the quaternions, basis (1, i, j, k).
QUATERNION_UNITS = (
    ((0, -1, 0, 0), (1, 0, 0, 0), (0, 0, 0, -1), (0, 0, 1, 0)),
    ((0, 0, -1, 0), (0, 0, 0, 1), (1, 0, 0, 0), (0, -1, 0, 0)),
    ((0, 0, 0, -1), (0, 0, -1, 0), (0, 1, 0, 0), (1, 0, 0, 0)),
)

# Split quaternions acting on 2x2 real matrices (row-major) by left multiplication,
# K1² = K2² = 1, K3² = -1, and the polarised determinant pairing.
_SPLIT_UNITS = (((1, 0), (0, -1)), ((0, 1), (1, 0)), ((0, -1), (1, 0)))
_DET_PAIRING = ((0, 0, 0, 1), (0, 0, -1, 0), (0, -1, 0, 0), (1, 0, 0, 0))


def _block_diag(m: np.ndarray, n: int) -> np.ndarray:
    k = m.shape[0]
    out = linalg.zeros(k * n, k * n)
    for b in range(n):
        out[b * k:(b + 1) * k, b * k:(b + 1) * k] = m
    return out


def quaternion_units(n: int = 1) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    return tuple(_block_diag(linalg.frac_matrix(u), n) for u in QUATERNION_UNITS)


def split_quaternion_units(n: int = 1) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    return tuple(_block_diag(np.kron(linalg.frac_matrix(u), linalg.eye(2)), n) for u in _SPLIT_UNITS)


def quaternionic_triple(n: int = 1) -> tuple[LieStructure, FormTriple]:
    """Abelian ℝ^{4n} with ω_i(X, Y) = ⟨J_iX, Y⟩, signs (-1, -1, -1)."""
    if n < 1:
        raise ValueError("n must be positive")
    return abelian(4 * n), FormTriple.build(quaternion_units(n), HYPERSYMPLECTIC)


def para_triple(n: int = 1) -> tuple[LieStructure, FormTriple]:
    """Abelian ℝ^{4n} with ω_i = H·K_i for the split quaternions, signs (1, 1, -1)."""
    if n < 1:
        raise ValueError("n must be positive")
    h = _block_diag(linalg.frac_matrix(_DET_PAIRING), n)
    return abelian(4 * n), FormTriple.build([h @ k for k in split_quaternion_units(n)], PARA_NORMAL)


# -- random data ------------------------------------------------------------------------


def _rand_fraction(rng: random.Random, bound: int = 3, denominators=(1, 1, 1, 2)) -> Fraction:
    return Fraction(rng.randint(-bound, bound), rng.choice(denominators))


def random_skew(rng: random.Random, d: int, bound: int = 3) -> np.ndarray:
    m = linalg.zeros(d, d)
    for i in range(d):
        for j in range(i + 1, d):
            x = _rand_fraction(rng, bound)
            m[i, j], m[j, i] = x, -x
    return m


def random_nondegenerate_skew(rng: random.Random, d: int, tries: int = 50) -> np.ndarray:
    if d % 2:
        raise GenerationError(f"no nondegenerate skew form in odd dimension {d}")
    for _ in range(tries):
        m = random_skew(rng, d)
        if linalg.det(m) != 0:
            return m
    raise GenerationError("could not draw a nondegenerate skew matrix")


def random_form_triple(seed: int, d: int, eps: EpsilonTriple = HYPERSYMPLECTIC) -> FormTriple:
    rng = random.Random(seed)
    return FormTriple.build([random_nondegenerate_skew(rng, d) for _ in range(3)], eps)


def random_element(rng: random.Random, basis: BasisSpec, degree: int, density: float = 0.5,
                   bidegree: Optional[tuple[int, int]] = None) -> GradedElement:
    masks = (bidegree_masks(basis, *bidegree) if bidegree else monomial_masks(basis, degree))
    terms = {}
    for m in masks:
        if rng.random() < density:
            c = _rand_fraction(rng)
            if c:
                terms[m] = c
    return GradedElement(basis, terms)


def random_theta(seed: int, d: int, density: float = 0.4) -> CourantStructure:
    rng = random.Random(seed)
    return CourantStructure(random_element(rng, BasisSpec(d), 3, density))


def random_skew_endo(rng: random.Random, basis: BasisSpec, density: float = 0.6) -> Endomorphism:
    return endo_from_function(random_element(rng, basis, 2, density))


def random_invertible(rng: random.Random, d: int, tries: int = 50) -> np.ndarray:
    for _ in range(tries):
        m = linalg.zeros(d, d)
        for i in range(d):
            for j in range(d):
                m[i, j] = Fraction(rng.randint(-2, 2))
        if linalg.det(m) != 0:
            return m
    raise GenerationError("could not draw an invertible matrix")


def transform_constants(c: np.ndarray, p: np.ndarray) -> np.ndarray:
    """Constants of the same algebra in the basis f_b = Σ_a p[a, b] e_a."""
    q = linalg.inverse(p)
    return np.einsum("ea,axy,xb,yc->ebc", q, c, p, p)


def _semidirect(d: int, m: np.ndarray, lead: int = 0) -> np.ndarray:
    """ℝ ⋉_M ℝ^{d-1}: [e_lead, e_x] = M e_x on the remaining vectors."""
    c = linalg.zeros(d, d, d)
    rest = [k for k in range(d) if k != lead]
    for col, x in enumerate(rest):
        for row, a in enumerate(rest):
            c[a, lead, x] = m[row, col]
            c[a, x, lead] = -m[row, col]
    return c


def _so3() -> np.ndarray:
    c = linalg.zeros(3, 3, 3)
    for a, b, cc in ((0, 1, 2), (1, 2, 0), (2, 0, 1)):
        c[a, b, cc], c[a, cc, b] = Fraction(1), Fraction(-1)
    return c


def random_lie(seed: int, d: int) -> LieStructure:
    """A Lie algebra from a Jacobi-safe family, in a random basis."""
    rng = random.Random(seed)
    if d < 2:
        return abelian(d)
    family = rng.choice(["semidirect", "heisenberg", "so3"] if d >= 3 else ["semidirect"])
    if family == "semidirect":
        m = linalg.zeros(d - 1, d - 1)
        for i in range(d - 1):
            for j in range(d - 1):
                m[i, j] = Fraction(rng.randint(-2, 2))
        c = _semidirect(d, m)
    else:
        c = linalg.zeros(d, d, d)
        if family == "heisenberg":
            c[2, 0, 1], c[2, 1, 0] = Fraction(1), Fraction(-1)
        else:
            c[:3, :3, :3] = _so3()
    c = transform_constants(c, random_invertible(rng, d))
    return lie_from_constants(d, c, require_jacobi=True)


def random_constants(rng: random.Random, d: int, density: float = 0.3) -> np.ndarray:
    """Antisymmetric constants with no Jacobi guarantee (negative corpus)."""
    c = linalg.zeros(d, d, d)
    for a in range(d):
        for b in range(d):
            for cc in range(b + 1, d):
                if rng.random() < density:
                    x = Fraction(rng.randint(-2, 2))
                    c[a, b, cc], c[a, cc, b] = x, -x
    return c


# -- linear constructions --------------------------------------------------------------------


def theta_solutions(basis: BasisSpec, conditions: Sequence[Callable[[GradedElement], np.ndarray]]) -> list[GradedElement]:
    """Basis of the degree-3 Θ on which every linear condition vanishes."""
    monos = degree3_basis(basis)
    cols = [np.concatenate([np.asarray(f(m), dtype=object).ravel() for f in conditions]) for m in monos]
    a = np.stack(cols, axis=1)
    out = []
    for v in linalg.nullspace(a):
        terms = {next(iter(mono.terms)): x for mono, x in zip(monos, v) if x != 0}
        out.append(GradedElement(basis, terms))
    return out


def torsion_condition(i: Endomorphism) -> Callable[[GradedElement], np.ndarray]:
    return lambda th: torsion_tensor(bracket_tensor(th), i).entries


def concomitant_condition(i: Endomorphism, j: Endomorphism) -> Callable[[GradedElement], np.ndarray]:
    from .courant import concomitant

    return lambda th: concomitant(th, i, j).entries


def combine(rng: random.Random, vectors: Sequence, zero, bound: int = 2):
    """A random nonzero integer combination of ``vectors`` (zero if there are none)."""
    if not vectors:
        return zero
    while True:
        coeffs = [rng.randint(-bound, bound) for _ in vectors]
        if any(coeffs):
            break
    total = zero
    for c, v in zip(coeffs, vectors):
        if c:
            total = total + v.scale(c) if hasattr(v, "scale") else total + v * c
    return total


def nijenhuis_theta(rng: random.Random, endos: Sequence[Endomorphism],
                    pairs: Sequence[tuple[Endomorphism, Endomorphism]] = ()) -> Optional[CourantStructure]:
    """A random Θ for which each endo has zero torsion and each pair zero concomitant."""
    basis = endos[0].basis if endos else pairs[0][0].basis
    conds = [torsion_condition(e) for e in endos] + [concomitant_condition(a, b) for a, b in pairs]
    sols = theta_solutions(basis, conds)
    if not sols:
        return None
    return CourantStructure(combine(rng, sols, GradedElement.zero(basis)))


def cayley_orthogonal(rng: random.Random, basis: BasisSpec, tries: int = 50) -> Endomorphism:
    """(1 - K)⁻¹(1 + K) for a random skew K; orthogonal for the pairing."""
    one = Endomorphism.identity(basis)
    for _ in range(tries):
        k = random_skew_endo(rng, basis, 0.3)
        a = (one - k).matrix
        if linalg.det(a) != 0:
            return Endomorphism(basis, linalg.matmul(linalg.inverse(a), (one + k).matrix))
    raise GenerationError("no invertible 1 - K within the retry bound")


# Square -1 and square +1 in gl(2); they anti-commute and their product squares to +1.
_ROT = ((0, -1), (1, 0))
_REF = ((1, 0), (0, -1))


def _gl_embed(basis: BasisSpec, n) -> Endomorphism:
    n = linalg.frac_matrix(n)
    return Endomorphism.from_blocks(basis, aa=n, dualdual=-n.T)


def anticommuting_pair(
    seed: int, squares: tuple[int, int] = (-1, 1), dim: int = 2
) -> tuple[Endomorphism, Endomorphism]:
    """Skew, anti-commuting I, J on A ⊕ A* with dim A = dim (even) and I², J² the given scalars.

    gl(dim) sits inside the skew maps as N ↦ diag(N, -Nᵀ); the gl(2) pair is
    repeated down the diagonal, then a random orthogonal conjugation spreads it
    across the blocks.  At dim 2 every such map is Nijenhuis for every Θ, so
    anything that should be able to fail wants dim 4.
    """
    if dim < 2 or dim % 2:
        raise ValueError(f"dim must be even and positive, got {dim}")
    basis = BasisSpec(dim)
    block = np.kron(np.eye(dim // 2, dtype=int), np.array(_ROT)), np.kron(np.eye(dim // 2, dtype=int), np.array(_REF))
    rot, ref = (_gl_embed(basis, m.tolist()) for m in block)
    base = {(-1, 1): (rot, ref), (1, -1): (ref, rot), (1, 1): (ref, rot @ ref)}
    if squares not in base:
        raise ValueError(f"no anti-commuting pair with squares {squares} from this construction")
    i, j = base[squares]
    o = cayley_orthogonal(random.Random(seed), basis)
    ot = transpose_endo(o)
    return o @ i @ ot, o @ j @ ot


# -- structure-constant searches ----------------------------------------------------------------


def _unit_constants(d: int) -> list[np.ndarray]:
    out = []
    for a in range(d):
        for b in range(d):
            for c in range(b + 1, d):
                u = linalg.zeros(d, d, d)
                u[a, b, c], u[a, c, b] = Fraction(1), Fraction(-1)
                out.append(u)
    return out


def _semidirect_units(d: int, lead: int) -> list[np.ndarray]:
    out = []
    for r in range(d - 1):
        for s in range(d - 1):
            m = linalg.zeros(d - 1, d - 1)
            m[r, s] = Fraction(1)
            out.append(_semidirect(d, m, lead))
    return out


def _line_plus_su2(d: int, central: int) -> np.ndarray:
    """ℝ ⊕ su(2) on four of the basis vectors, e_central spanning the centre."""
    c = linalg.zeros(d, d, d)
    rest = [k for k in range(4) if k != central]
    so = _so3()
    for a, b, cc in itertools.product(range(3), repeat=3):
        c[rest[a], rest[b], rest[cc]] = so[a, b, cc]
    return c


def scaffolds(d: int) -> list[tuple[str, list[np.ndarray]]]:
    """Parametrised families of constants, as lists of basis arrays.

    Semidirect products ℝ ⋉ ℝ^{d-1} and ℝ ⊕ su(2) satisfy Jacobi for every
    parameter value; the generic family needs an explicit Jacobi check.
    """
    out = [(f"semidirect@{lead + 1}", _semidirect_units(d, lead)) for lead in range(d)]
    out += [(f"line+su2@{k + 1}", [_line_plus_su2(d, k)]) for k in range(4)]
    out.append(("generic", _unit_constants(d)))
    return out


def _mu_of(c: np.ndarray) -> GradedElement:
    return lie_from_constants(c.shape[0], c).element


def constants_solutions(units: Sequence[np.ndarray], condition: Callable[[np.ndarray], np.ndarray]) -> list[np.ndarray]:
    """Combinations of ``units`` annihilated by a condition linear in the constants."""
    cols = [np.asarray(condition(u), dtype=object).ravel() for u in units]
    a = np.stack(cols, axis=1)
    return [sum((u * x for u, x in zip(units, v) if x != 0), linalg.zeros(*units[0].shape))
            for v in linalg.nullspace(a)]


def closedness_condition(forms: FormTriple) -> Callable[[np.ndarray], np.ndarray]:
    basis = forms.basis
    elements = [forms.omega(i).element(basis) for i in (1, 2, 3)]

    def cond(c):
        mu = _mu_of(c)
        out = []
        for w in elements:
            r = big_bracket(mu, w)
            out.extend(r.coefficient(m) for m in bidegree_masks(basis, 0, 3))
        return np.array(out, dtype=object)

    return cond


def torsion_structure_condition(forms: FormTriple) -> Callable[[np.ndarray], np.ndarray]:
    """N₁dω₁ - N₂dω₂ and N₁dω₁ - N₃dω₃, linear in the constants."""

    def cond(c):
        lie = LieStructure(forms.basis, _mu_of(c))
        p = {i: pulled_back_differential(lie, forms, i) for i in (1, 2, 3)}
        return np.concatenate([(p[1] - p[2]).ravel(), (p[1] - p[3]).ravel()])

    return cond


def search_constants(units: Sequence[np.ndarray], condition, seed: int, budget: int,
                     accept: Callable[[np.ndarray], bool]) -> Optional[np.ndarray]:
    """Sample integer combinations of the solution space; return the first accepted one."""
    sols = constants_solutions(units, condition)
    if not sols:
        return None
    rng = random.Random(seed)
    zero = linalg.zeros(*units[0].shape)
    for _ in range(budget):
        c = combine(rng, sols, zero)
        if linalg.is_zero(classical_jacobi_defect(c)) and accept(c):
            return c
    return None


def search_hyper_lie(forms: FormTriple, seed: int = 0, budget: int = 50,
                     nonabelian: bool = True) -> Optional[LieStructure]:
    """A Lie bracket on A for which the three forms are closed."""
    cond = closedness_condition(forms)
    for _, units in scaffolds(forms.dim):
        c = search_constants(units, cond, seed, budget, lambda c: not (nonabelian and linalg.is_zero(c)))
        if c is not None:
            return lie_from_constants(forms.dim, c, require_jacobi=True)
    return None


def search_dual_hyper_lie(forms: FormTriple, seed: int = 0, budget: int = 50) -> Optional[LieStructure]:
    """A bracket γ on A* for which the bivectors, read as forms on A*, are closed."""
    found = search_hyper_lie(forms.swapped(), seed, budget)
    return None if found is None else found.swapped()


@dataclass(frozen=True)
class TorsionInstance:
    mu: LieStructure
    forms: FormTriple
    scaffold: str
    degenerate: bool  # ψ = 0

    @property
    def psi(self) -> GradedElement:
        return build_psi(self.mu, self.forms.pi(1))


def search_torsion_instance(d: int, seed: int, budget: int,
                            forms: Optional[FormTriple] = None) -> Optional[TorsionInstance]:
    """Structure constants making the (quaternionic) forms a torsion structure with ψ ≠ 0.

    Candidates are integer combinations of the solution space of the linear
    torsion condition inside each scaffold, visited in a fixed order; the
    budget counts candidates over all scaffolds.
    """
    if d < 4 or d % 4:
        raise ValueError("torsion search needs d a positive multiple of 4")
    if forms is None:
        forms = quaternionic_triple(d // 4)[1]
    if not all(n_squared_ok(forms, i) for i in (1, 2, 3)):
        raise ValueError("forms do not satisfy N_i² = -id")
    cond = torsion_structure_condition(forms)
    families = scaffolds(d)
    per = max(1, budget // len(families)) if budget > 0 else 0
    for name, units in families:
        def accept(c, name=name):
            lie = lie_from_constants(d, c)
            return not build_psi(lie, forms.pi(1)).is_zero()

        c = search_constants(units, cond, seed, per, accept)
        if c is not None:
            lie = lie_from_constants(d, c, require_jacobi=True)
            if not check_hyper_with_torsion(lie, forms).passed:
                raise GenerationError("accepted candidate fails the torsion check")
            return TorsionInstance(lie, forms, name, False)
    return None


def search_torsion_instances(d: int, seed: int, budget: int,
                             forms: Optional[FormTriple] = None) -> list[TorsionInstance]:
    """At most one nonzero-ψ instance per scaffold, in scaffold order."""
    if forms is None:
        forms = quaternionic_triple(d // 4)[1]
    cond = torsion_structure_condition(forms)
    families = scaffolds(d)
    per = max(1, budget // len(families)) if budget > 0 else 0
    found = []
    for name, units in families:
        c = search_constants(units, cond, seed, per,
                             lambda c: not build_psi(lie_from_constants(d, c), forms.pi(1)).is_zero())
        if c is not None:
            found.append(TorsionInstance(lie_from_constants(d, c, require_jacobi=True), forms, name, False))
    return found


def degenerate_torsion_instance(d: int = 4) -> TorsionInstance:
    """Abelian scaffold: always a torsion structure, with ψ = 0."""
    mu, forms = quaternionic_triple(d // 4)
    return TorsionInstance(mu, forms, "abelian", True)


# -- instance specs ----------------------------------------------------------------------------

KINDS = ("quaternionic", "para", "random-skew", "searched-torsion")


@dataclass(frozen=True)
class InstanceSpec:
    kind: str
    dim: int
    seed: int = 0
    budget: int = 200

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown kind {self.kind!r}; expected one of {', '.join(KINDS)}")
        if self.kind in ("quaternionic", "para", "searched-torsion") and (self.dim < 4 or self.dim % 4):
            raise ValueError(f"{self.kind} instances need dim a positive multiple of 4")

    def build(self) -> tuple[LieStructure, FormTriple]:
        if self.kind == "quaternionic":
            return quaternionic_triple(self.dim // 4)
        if self.kind == "para":
            return para_triple(self.dim // 4)
        if self.kind == "random-skew":
            return abelian(self.dim), random_form_triple(self.seed, self.dim)
        found = search_torsion_instance(self.dim, self.seed, self.budget)
        if found is None:
            raise GenerationError(f"no torsion instance within budget {self.budget}")
        return found.mu, found.forms


__all__ = [
    "InstanceSpec",
    "KINDS",
    "TorsionInstance",
    "anticommuting_pair",
    "cayley_orthogonal",
    "closedness_condition",
    "concomitant_condition",
    "combine",
    "constants_solutions",
    "degenerate_torsion_instance",
    "nijenhuis_theta",
    "para_triple",
    "quaternion_units",
    "quaternionic_triple",
    "random_constants",
    "random_element",
    "random_form_triple",
    "random_lie",
    "random_nondegenerate_skew",
    "random_skew",
    "random_skew_endo",
    "random_theta",
    "scaffolds",
    "search_constants",
    "search_dual_hyper_lie",
    "search_hyper_lie",
    "search_torsion_instance",
    "search_torsion_instances",
    "split_quaternion_units",
    "theta_solutions",
    "torsion_condition",
    "transform_constants",
]
