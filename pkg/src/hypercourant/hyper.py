"""ε-hypersymplectic triples on a pre-Courant algebroid and their companions.

Indices live in Z₃: ``prev(1) = 3`` and ``next(3) = 1``.  Every identity is
checked as an exact matrix equation; nothing is assumed from the axioms.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, NamedTuple, Optional

import numpy as np

from . import linalg
from .courant import (
    CourantStructure,
    Endomorphism,
    anticommute,
    bracket_tensor,
    concomitant,
    deform,
    deform2,
    function_from_skew_endo,
    is_skew,
    is_symmetric,
    nijenhuis_torsion,
    pairing_gram,
    skewness_defect,
    transpose_endo,
)
from .errors import DimensionMismatchError, InternalConsistencyError, PreconditionError, WellDefinednessError
from .gca import GradedElement
from .report import CheckReport, array_witness, element_json

INDICES = (1, 2, 3)


def prev(i: int) -> int:
    return (i - 2) % 3 + 1


def next_(i: int) -> int:
    return i % 3 + 1


# -- sign triples -----------------------------------------------------------------


@dataclass(frozen=True)
class EpsilonTriple:
    eps1: int
    eps2: int
    eps3: int

    def __post_init__(self):
        for e in (self.eps1, self.eps2, self.eps3):
            if e not in (1, -1) or isinstance(e, bool):
                raise ValueError(f"signs must be +1 or -1, got {e!r}")

    @classmethod
    def of(cls, signs: Iterable[int]) -> "EpsilonTriple":
        return cls(*signs)

    def __getitem__(self, i: int) -> int:
        """1-based with Z₃ wraparound, so eps[0] is ε₃ and eps[4] is ε₁."""
        return self.as_tuple()[(i - 1) % 3]

    def as_tuple(self) -> tuple[int, int, int]:
        return (self.eps1, self.eps2, self.eps3)

    @property
    def product(self) -> int:
        return self.eps1 * self.eps2 * self.eps3

    def rotate(self, k: int) -> "EpsilonTriple":
        """Relabel i -> i + k; rotate(1) maps (a, b, c) to (c, a, b)."""
        t = self.as_tuple()
        return EpsilonTriple(*(t[(j - k) % 3] for j in range(3)))

    def __str__(self) -> str:
        return "(" + ", ".join("+1" if e > 0 else "-1" for e in self.as_tuple()) + ")"


HYPERSYMPLECTIC = EpsilonTriple(-1, -1, -1)
PARA_NORMAL = EpsilonTriple(1, 1, -1)


class Classification(NamedTuple):
    kind: str  # "hypersymplectic" | "para-hypersymplectic" | "other"
    shift: Optional[int] = None  # rotation bringing a para triple to (1, 1, -1)


def classify(eps: EpsilonTriple) -> Classification:
    if eps == HYPERSYMPLECTIC:
        return Classification("hypersymplectic", 0)
    if eps.product == -1:
        shift = next(k for k in range(3) if eps.rotate(k) == PARA_NORMAL)
        return Classification("para-hypersymplectic", shift)
    return Classification("other")


def is_normal_form(eps: EpsilonTriple) -> bool:
    return eps in (HYPERSYMPLECTIC, PARA_NORMAL)


# -- triples and quadruples ------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class HyperTriple:
    s1: Endomorphism
    s2: Endomorphism
    s3: Endomorphism
    eps: EpsilonTriple
    functions: Optional[tuple[GradedElement, GradedElement, GradedElement]] = None

    def __post_init__(self):
        dims = {s.basis.dim for s in (self.s1, self.s2, self.s3)}
        if len(dims) != 1:
            raise DimensionMismatchError(f"S_i act on spaces of different dimension: {sorted(dims)}")

    @classmethod
    def from_functions(cls, funs, eps: EpsilonTriple) -> "HyperTriple":
        from .courant import endo_from_function

        funs = tuple(funs)
        return cls(*(endo_from_function(f) for f in funs), eps=eps, functions=funs)

    @property
    def basis(self):
        return self.s1.basis

    def s(self, i: int) -> Endomorphism:
        return (self.s1, self.s2, self.s3)[(i - 1) % 3]

    def function(self, i: int) -> GradedElement:
        """Degree-2 representative of S_i, derived from the matrix when not supplied."""
        if self.functions is not None:
            return self.functions[(i - 1) % 3]
        return function_from_skew_endo(self.s(i))

    def __eq__(self, other) -> bool:
        if not isinstance(other, HyperTriple):
            return NotImplemented
        return self.eps == other.eps and all(self.s(i) == other.s(i) for i in INDICES)


@dataclass(frozen=True, eq=False)
class HyperkahlerQuad:
    t1: Endomorphism
    t2: Endomorphism
    t3: Endomorphism
    g: Endomorphism

    def t(self, i: int) -> Endomorphism:
        return (self.t1, self.t2, self.t3)[(i - 1) % 3]

    @property
    def basis(self):
        return self.g.basis

    def __eq__(self, other) -> bool:
        if not isinstance(other, HyperkahlerQuad):
            return NotImplemented
        return self.g == other.g and all(self.t(i) == other.t(i) for i in INDICES)


def _check_dims(theta: CourantStructure, basis):
    if theta.basis.dim != basis.dim:
        raise DimensionMismatchError(f"structure has dim {theta.basis.dim}, endomorphisms have dim {basis.dim}")


def _matrix_witness(lhs: Endomorphism, rhs: Endomorphism):
    return array_witness(lhs.matrix - rhs.matrix, kind="matrix-entry")


# -- eps-hypersymplectic triples ---------------------------------------------------------


def check_eps_hypersymplectic(theta: CourantStructure, h: HyperTriple) -> CheckReport:
    """Axioms 0 (skewness), i), ii) and iii) of an ε-hypersymplectic triple.

    Axiom iii) is evaluated twice: as Θ_{S_i,S_i} = ε_iΘ and as vanishing
    torsion of S_i.  Whenever S_i² = ε_i id the two verdicts must coincide.
    """
    _check_dims(theta, h.basis)
    eps = h.eps
    report = CheckReport("eps-hypersymplectic", classification=classify(eps).kind)
    ident = Endomorphism.identity(h.basis)
    skew = {}
    for i in INDICES:
        pair = skewness_defect(h.s(i))
        skew[i] = pair is None
        report.add(f"0:S{i} skew", skew[i],
                   None if pair is None else {"kind": "basis-pair", "index": list(pair)})
    square_ok = {}
    for i in INDICES:
        target = ident.scale(eps[i])
        sq = h.s(i).square()
        square_ok[i] = sq == target
        report.add(f"i:S{i}^2 = eps{i} id", square_ok[i], _matrix_witness(sq, target))
    for i, j in ((1, 2), (2, 3), (3, 1)):
        lhs = h.s(i) @ h.s(j)
        rhs = (h.s(j) @ h.s(i)).scale(eps.product)
        report.add(f"ii:S{i}S{j} = e1e2e3 S{j}S{i}", lhs == rhs, _matrix_witness(lhs, rhs))
    for i in INDICES:
        torsion = nijenhuis_torsion(theta, h.s(i), cross_check=skew[i])
        torsion_ok = torsion.is_zero()
        if skew[i]:
            fun = h.function(i)
            diff = deform2(theta, fun, fun).theta - theta.theta.scale(eps[i])
            deform_ok = diff.is_zero()
            report.add(f"iii:Theta_S{i}S{i} = eps{i} Theta", deform_ok,
                       None if deform_ok else element_json(diff))
        else:
            deform_ok = False
            report.add(f"iii:Theta_S{i}S{i} = eps{i} Theta", False, detail="S_i is not skew; no function representative")
        report.add(f"iii':torsion S{i} = 0", torsion_ok, torsion.witness())
        if skew[i] and square_ok[i] and deform_ok != torsion_ok:
            raise InternalConsistencyError(f"axiom iii routes disagree for S{i}")
    return report


# -- transition morphisms and metric --------------------------------------------------------


def transition(h: HyperTriple, i: int) -> Endomorphism:
    """T_i = ε_{i-1} S_{i-1} S_{i+1}."""
    return (h.s(prev(i)) @ h.s(next_(i))).scale(h.eps[prev(i)])


def transitions(h: HyperTriple) -> tuple[Endomorphism, Endomorphism, Endomorphism]:
    return tuple(transition(h, i) for i in INDICES)


def metric(h: HyperTriple) -> Endomorphism:
    """G = S_{i+1} S_i S_{i-1}, checked to be independent of i."""
    products = {i: h.s(next_(i)) @ h.s(i) @ h.s(prev(i)) for i in INDICES}
    for i, j in ((1, 2), (2, 3)):
        if products[i] != products[j]:
            raise WellDefinednessError(
                f"cyclic products disagree: S{next_(i)}S{i}S{prev(i)} != S{next_(j)}S{j}S{prev(j)}",
                mismatch=(i, j),
            )
    return products[1]


def verify_structure_relations(h: HyperTriple) -> CheckReport:
    """Every displayed identity relating S_i, T_i and G."""
    report = CheckReport("structure relations")
    eps, e = h.eps, h.eps.product
    ident = Endomorphism.identity(h.basis)
    s = {i: h.s(i) for i in INDICES}
    t = {i: transition(h, i) for i in INDICES}
    try:
        g = metric(h)
    except WellDefinednessError as exc:
        report.add("G well-defined", False, {"kind": "index-pair", "index": list(exc.mismatch)}, str(exc))
        return report
    report.add("G well-defined", True)

    def eq(name, lhs, rhs):
        report.add(name, lhs == rhs, _matrix_witness(lhs, rhs))

    for i in INDICES:
        p, n = prev(i), next_(i)
        eq(f"S{p}T{i} = S{n}", s[p] @ t[i], s[n])
        eq(f"T{i}* = e T{i}", transpose_endo(t[i]), t[i].scale(e))
        eq(f"T{i}^2 = eps{i} id", t[i].square(), ident.scale(eps[i]))
        eq(f"T{p}T{n} = e T{n}T{p}", t[p] @ t[n], (t[n] @ t[p]).scale(e))
        eq(f"T{p}T{n} = eps{i} T{i}", t[p] @ t[n], t[i].scale(eps[i]))
    eq("T3T2T1 = id", t[3] @ t[2] @ t[1], ident)
    eq("e T1T2T3 = id", (t[1] @ t[2] @ t[3]).scale(e), ident)
    eq("G* = -e G", transpose_endo(g), g.scale(-e))
    eq("G^2 = id", g.square(), ident)
    for i in INDICES:
        p = prev(i)
        eq(f"T{i}S{i} = eps{p} G", t[i] @ s[i], g.scale(eps[p]))
        eq(f"S{i}T{i} = eps{p} G", s[i] @ t[i], g.scale(eps[p]))
        eq(f"GS{i} = eps{p}eps{i} T{i}", g @ s[i], t[i].scale(eps[p] * eps[i]))
        eq(f"S{i}G = eps{p}eps{i} T{i}", s[i] @ g, t[i].scale(eps[p] * eps[i]))
        eq(f"GT{i} = eps{p}eps{i} S{i}", g @ t[i], s[i].scale(eps[p] * eps[i]))
        eq(f"T{i}G = eps{p}eps{i} S{i}", t[i] @ g, s[i].scale(eps[p] * eps[i]))
        for j in INDICES:
            if j == i:
                continue
            target = s[next_(i)] if j == prev(i) else s[prev(i)].scale(eps[i])
            eq(f"S{j}T{i}", s[j] @ t[i], target)
            eq(f"e T{i}S{j}", (t[i] @ s[j]).scale(e), target)
    p_gram = pairing_gram(h.basis)
    g_form = g.matrix.T @ p_gram  # ⟨G e_u, e_v⟩
    for i in INDICES:
        gt = (g @ t[i]).matrix
        lhs = gt.T @ p_gram @ t[i].matrix  # ⟨G T_i e_u, T_i e_v⟩
        rhs = g_form * (eps[prev(i)] * eps[next_(i)])
        report.add(f"<GT{i}X, T{i}Y> = eps eps <GX, Y>", linalg.equal(lhs, rhs),
                   array_witness(lhs - rhs, "basis-pair"))
    return report


# -- metrics and hermitian pairs ----------------------------------------------------------------


def _metric_form(g: Endomorphism) -> np.ndarray:
    return g.matrix.T @ pairing_gram(g.basis)


def is_pseudo_metric(g: Endomorphism) -> bool:
    """Symmetric and orthogonal; the equivalent 'symmetric and G² = id' test must agree."""
    sym = is_symmetric(g)
    orth = g @ transpose_endo(g) == Endomorphism.identity(g.basis)
    via_square = g.square() == Endomorphism.identity(g.basis)
    if sym and orth != via_square:
        raise InternalConsistencyError("orthogonality and G² = id disagree for a symmetric G")
    return sym and orth


def is_positive_definite(g: Endomorphism) -> bool:
    """⟨G u, u⟩ > 0 for u ≠ 0, by leading principal minors of the (symmetric) Gram form."""
    form = _metric_form(g)
    if not linalg.is_symmetric(form):
        return False
    return all(m > 0 for m in linalg.leading_principal_minors(form))


def _structure_type(theta: CourantStructure, j: Endomorphism) -> Optional[str]:
    lam = j.square_scalar()
    if lam not in (1, -1):
        return None
    if not nijenhuis_torsion(theta, j).is_zero():
        return None
    return "complex" if lam == -1 else "para-complex"


def is_hermitian_pair(theta: CourantStructure, j: Endomorphism, g: Endomorphism) -> str:
    """'hermitian', 'para-hermitian' or 'neither'."""
    kind = _structure_type(theta, j)
    if kind is None or not is_pseudo_metric(g):
        return "neither"
    sign = 1 if kind == "complex" else -1
    p_gram = pairing_gram(g.basis)
    lhs = (g @ j).matrix.T @ p_gram @ j.matrix
    holds = linalg.equal(lhs, _metric_form(g) * sign)
    if is_skew(j) and holds != (g @ j == j @ g):
        raise InternalConsistencyError("compatibility condition and GJ = JG disagree for skew J")
    if not holds:
        return "neither"
    return "hermitian" if kind == "complex" else "para-hermitian"


# -- hyperkähler side ----------------------------------------------------------------------


def quad_kind(q: HyperkahlerQuad) -> Optional[str]:
    """'hyperkähler' if T₁² = -id, 'para-hyperkähler' if T₁² = id, else None."""
    lam = q.t1.square_scalar()
    return {-1: "hyperkähler", 1: "para-hyperkähler"}.get(lam)


def check_hyperkahler(theta: CourantStructure, q: HyperkahlerQuad) -> CheckReport:
    _check_dims(theta, q.basis)
    kind = quad_kind(q)
    report = CheckReport("hyperkähler", classification=kind)
    report.add("i:G pseudo-metric", is_pseudo_metric(q.g))
    lam = -1 if kind in (None, "hyperkähler") else 1
    want = "complex" if lam == -1 else "para-complex"
    pair = "hermitian" if lam == -1 else "para-hermitian"
    ident = Endomorphism.identity(q.basis)
    for i in (1, 2):
        sq = q.t(i).square()
        report.add(f"ii:T{i}^2 = {lam:+d} id", sq == ident.scale(lam), _matrix_witness(sq, ident.scale(lam)))
        report.add(f"ii:T{i} {want}", _structure_type(theta, q.t(i)) == want)
    report.add("ii:T1T2 = -T2T1", anticommute(q.t1, q.t2), _matrix_witness(q.t1 @ q.t2, -(q.t2 @ q.t1)))
    report.add("ii:T3 = T1T2", q.t3 == q.t1 @ q.t2, _matrix_witness(q.t3, q.t1 @ q.t2))
    for i in (1, 2):
        report.add(f"iii:(T{i}, G) {pair}", is_hermitian_pair(theta, q.t(i), q.g) == pair)
    for i in INDICES:
        tors = nijenhuis_torsion(theta, q.g @ q.t(i))
        report.add(f"iv:torsion GT{i} = 0", tors.is_zero(), tors.witness())
    # consequences stated after the definition, recorded but not part of the verdict
    report.notes.append(f"(T3, G) is {is_hermitian_pair(theta, q.t3, q.g)}")
    report.notes.append("T_i pairwise anti-commute: "
                        + str(all(anticommute(q.t(a), q.t(b)) for a, b in ((1, 2), (2, 3), (1, 3)))))
    report.notes.append("skew T_j: " + ", ".join(str(is_skew(q.t(i))) for i in INDICES))
    return report


def _require_normal(eps: EpsilonTriple):
    c = classify(eps)
    if c.kind == "other":
        raise PreconditionError(f"sign triple {eps} has product +1; the correspondence needs product -1")
    if not is_normal_form(eps):
        raise PreconditionError(
            f"sign triple {eps} is para-hypersymplectic but not in normal form (1, 1, -1); "
            f"relabel indices by a cyclic shift of {c.shift} first"
        )


def to_hyperkahler(h: HyperTriple, theta: Optional[CourantStructure] = None) -> HyperkahlerQuad:
    _require_normal(h.eps)
    theta = theta or CourantStructure.zero(h.basis)
    report = check_eps_hypersymplectic(theta, h)
    if not report.passed:
        raise PreconditionError("input triple is not (para-)hypersymplectic", report=report)
    return HyperkahlerQuad(*transitions(h), g=metric(h))


def from_hyperkahler(q: HyperkahlerQuad, eps: EpsilonTriple,
                     theta: Optional[CourantStructure] = None) -> HyperTriple:
    """S_i = ε_i ε_{i-1} G T_i."""
    _require_normal(eps)
    theta = theta or CourantStructure.zero(q.basis)
    report = check_hyperkahler(theta, q)
    if not report.passed:
        raise PreconditionError("input quadruple is not (para-)hyperkähler", report=report)
    expected = "hyperkähler" if eps == HYPERSYMPLECTIC else "para-hyperkähler"
    if quad_kind(q) != expected:
        raise PreconditionError(f"quadruple is {quad_kind(q)}, sign triple {eps} needs {expected}", report=report)
    return HyperTriple(*((q.g @ q.t(i)).scale(eps[i] * eps[prev(i)]) for i in INDICES), eps=eps)


# -- swapping S_j for T_j ------------------------------------------------------------------

SWAP_PATTERNS = (frozenset(), frozenset({2, 3}), frozenset({1, 3}), frozenset({1, 2}))


class SwapResult(NamedTuple):
    triple: HyperTriple
    report: CheckReport
    metric_sign: int


def swap_structure(h: HyperTriple, pattern, theta: Optional[CourantStructure] = None) -> SwapResult:
    """Replace S_j by T_j for j in ``pattern`` and re-verify the result."""
    pattern = frozenset(pattern)
    if pattern not in SWAP_PATTERNS:
        raise ValueError(f"unsupported swap pattern {sorted(pattern)}; allowed: {{}}, {{2,3}}, {{1,3}}, {{1,2}}")
    if h.eps.product != -1:
        raise PreconditionError(f"sign triple {h.eps} has product +1")
    theta = theta or CourantStructure.zero(h.basis)
    parts = [transition(h, i) if i in pattern else h.s(i) for i in INDICES]
    signs = []
    for m in parts:
        lam = m.square_scalar()
        if lam not in (1, -1):
            raise PreconditionError("swapped endomorphism does not square to ±id")
        signs.append(int(lam))
    out = HyperTriple(*parts, eps=EpsilonTriple(*signs))
    report = check_eps_hypersymplectic(theta, out)
    g_old, g_new = metric(h), metric(out)
    if g_new == g_old:
        sign = 1
    elif g_new == -g_old:
        sign = -1
    else:
        raise InternalConsistencyError("swapped structure induces a metric neither equal nor opposite")
    return SwapResult(out, report, sign)


# -- deformed structures -----------------------------------------------------------------------


def check_deformed(h: HyperTriple, theta: CourantStructure) -> CheckReport:
    """Re-check the triple against Θ_{S_i} and Θ_{T_j} for all i, j."""
    report = CheckReport("deformed structures")
    original = check_eps_hypersymplectic(theta, h)
    report.add("original", original.passed)
    if h.eps.product != -1:
        raise PreconditionError(f"deformation by T_j needs product -1, got {h.eps}")
    for i in INDICES:
        sub = check_eps_hypersymplectic(deform(theta, h.function(i)), h)
        report.add(f"Theta_S{i}", sub.passed, detail=", ".join(v.name for v in sub.failures()))
    for j in INDICES:
        t_fun = function_from_skew_endo(transition(h, j))
        sub = check_eps_hypersymplectic(deform(theta, t_fun), h)
        report.add(f"Theta_T{j}", sub.passed, detail=", ".join(v.name for v in sub.failures()))
    return report


def transition_report(theta: CourantStructure, h: HyperTriple) -> CheckReport:
    """Transition morphisms are Nijenhuis and (para-)complex; all S/T pairs are Nijenhuis pairs."""
    report = CheckReport("transition morphisms")
    t = {i: transition(h, i) for i in INDICES}
    for i in INDICES:
        want = "complex" if h.eps[i] == -1 else "para-complex"
        report.add(f"T{i} {want}", _structure_type(theta, t[i]) == want)
    members = {**{f"S{i}": h.s(i) for i in INDICES}, **{f"T{i}": t[i] for i in INDICES}}
    pairs = [(f"S{i}", f"S{j}") for i, j in ((1, 2), (2, 3), (1, 3))]
    pairs += [(f"T{i}", f"T{j}") for i, j in ((1, 2), (2, 3), (1, 3))]
    pairs += [(f"S{i}", f"T{j}") for i in INDICES for j in INDICES if i != j]
    for a, b in pairs:
        x, y = members[a], members[b]
        ok = anticommute(x, y) and concomitant(theta, x, y).is_zero()
        report.add(f"Nijenhuis pair ({a}, {b})", ok)
    return report


__all__ = [
    "Classification",
    "EpsilonTriple",
    "HYPERSYMPLECTIC",
    "HyperTriple",
    "HyperkahlerQuad",
    "INDICES",
    "PARA_NORMAL",
    "SWAP_PATTERNS",
    "SwapResult",
    "check_deformed",
    "check_eps_hypersymplectic",
    "check_hyperkahler",
    "classify",
    "from_hyperkahler",
    "is_hermitian_pair",
    "is_normal_form",
    "is_positive_definite",
    "is_pseudo_metric",
    "metric",
    "next_",
    "prev",
    "quad_kind",
    "swap_structure",
    "to_hyperkahler",
    "transition",
    "transition_report",
    "transitions",
    "verify_structure_relations",
]
