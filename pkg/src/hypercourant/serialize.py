"""JSON instance documents: strict parsing, validation and canonical emission.

Rationals are written as ``{"n": int, "d": int}``; plain integers are also
accepted on input. Floats, decimals, booleans and NaN are rejected wherever a
number is expected. Emission is canonical (fixed key order, reduced
fractions, sorted constant tables), so ``emit(parse(emit(doc)))`` reproduces
the bytes exactly.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, replace
from decimal import Decimal
from fractions import Fraction
from typing import Any, Optional

import numpy as np

from . import linalg
from .algebroid import FormTriple, LieStructure, abelian, lie_from_constants
from .courant import CourantStructure, Endomorphism
from .errors import DocumentError, HyperCourantError
from .gca import BasisSpec, GradedElement, theta, xi
from .hyper import HYPERSYMPLECTIC, EpsilonTriple, HyperkahlerQuad, HyperTriple

SCHEMA = "hypercourant/instance/1"
KEYS = ("schema", "dim", "structure_constants", "dual_structure_constants", "omega", "pi",
        "epsilon", "theta_extra", "triple", "hyperkahler")


@dataclass(frozen=True, eq=False)
class InstanceDocument:
    """One instance: Lie data on A and A*, and either forms, a triple or a quadruple."""

    dim: int
    structure_constants: Optional[np.ndarray] = None
    dual_structure_constants: Optional[np.ndarray] = None
    omega: Optional[tuple[np.ndarray, ...]] = None
    pi: Optional[tuple[np.ndarray, ...]] = None
    epsilon: Optional[EpsilonTriple] = None
    theta_extra: Optional[dict[str, GradedElement]] = None
    triple: Optional[tuple[np.ndarray, ...]] = None
    hyperkahler: Optional[dict[str, Any]] = None

    @property
    def basis(self) -> BasisSpec:
        return BasisSpec(self.dim)

    def __eq__(self, other) -> bool:
        if not isinstance(other, InstanceDocument):
            return NotImplemented
        return emit(self) == emit(other)

    # -- derived objects ------------------------------------------------------------------

    def mu(self) -> LieStructure:
        if self.structure_constants is None:
            return abelian(self.basis)
        return lie_from_constants(self.basis, self.structure_constants)

    def gamma(self) -> LieStructure:
        if self.dual_structure_constants is None:
            return abelian(self.basis).swapped()
        return lie_from_constants(self.basis, self.dual_structure_constants).swapped()

    def eps(self) -> EpsilonTriple:
        return self.epsilon if self.epsilon is not None else HYPERSYMPLECTIC

    def forms(self) -> FormTriple:
        if self.omega is None:
            raise DocumentError("this command needs the 'omega' section")
        return FormTriple.build(self.omega, self.eps(), self.pi)

    def theta(self, extras: bool = False) -> CourantStructure:
        """Θ = μ + γ, plus the explicit ψ and φ when ``extras`` is set."""
        total = self.mu().element + self.gamma().element
        if extras and self.theta_extra:
            for part in self.theta_extra.values():
                total = total + part
        return CourantStructure(total)

    def hyper_triple(self) -> HyperTriple:
        from .algebroid import assemble

        if self.triple is not None:
            basis = self.basis
            return HyperTriple(*(Endomorphism(basis, m) for m in self.triple), eps=self.eps())
        if self.omega is not None:
            return assemble(self.forms())
        raise DocumentError("this command needs an 'omega' or 'triple' section")

    def quad(self) -> HyperkahlerQuad:
        if self.hyperkahler is None:
            raise DocumentError("this command needs the 'hyperkahler' section")
        basis = self.basis
        ts = [Endomorphism(basis, m) for m in self.hyperkahler["T"]]
        return HyperkahlerQuad(*ts, g=Endomorphism(basis, self.hyperkahler["G"]))


# -- parsing ------------------------------------------------------------------------------


def _reject_constant(name: str):
    raise DocumentError(f"non-finite number {name} is not allowed")


def _no_duplicates(pairs):
    out = {}
    for k, v in pairs:
        if k in out:
            raise DocumentError(f"duplicate key {k!r}")
        out[k] = v
    return out


def _rational(x, where: str) -> Fraction:
    if isinstance(x, bool):
        raise DocumentError("booleans are not numbers here", where)
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, Decimal):
        raise DocumentError(f"decimal {x} is not exact; write {{\"n\": …, \"d\": …}}", where)
    if isinstance(x, dict):
        if set(x) != {"n", "d"}:
            raise DocumentError(f"a rational has exactly the keys 'n' and 'd', got {sorted(x)}", where)
        n, d = x["n"], x["d"]
        for part, v in (("n", n), ("d", d)):
            if isinstance(v, bool) or not isinstance(v, int):
                raise DocumentError(f"'{part}' must be an integer, got {v!r}", where)
        if d == 0:
            raise DocumentError("zero denominator", where)
        return Fraction(n, d)
    raise DocumentError(f"expected a rational, got {type(x).__name__}", where)


def _index(x, dim: int, where: str) -> int:
    if isinstance(x, bool) or not isinstance(x, int) or not 1 <= x <= dim:
        raise DocumentError(f"expected an index in 1..{dim}, got {x!r}", where)
    return x


def _matrix(x, n: int, where: str) -> np.ndarray:
    if not isinstance(x, list) or len(x) != n:
        raise DocumentError(f"expected {n} rows", where)
    rows = []
    for r, row in enumerate(x):
        if not isinstance(row, list) or len(row) != n:
            raise DocumentError(f"expected {n} entries", f"{where}[{r}]")
        rows.append([_rational(v, f"{where}[{r}][{c}]") for c, v in enumerate(row)])
    return linalg.frac_matrix(rows)


def _three(x, where: str) -> list:
    if not isinstance(x, list) or len(x) != 3:
        raise DocumentError("expected a list of three entries", where)
    return x


def _skew_matrices(x, n: int, where: str) -> tuple[np.ndarray, ...]:
    out = []
    for i, m in enumerate(_three(x, where)):
        mat = _matrix(m, n, f"{where}[{i}]")
        if not linalg.is_skew(mat):
            bad = next((r, c) for r in range(n) for c in range(n) if mat[r, c] != -mat[c, r])
            raise DocumentError(f"matrix is not skew-symmetric (entries {bad} and {bad[::-1]})", f"{where}[{i}]")
        out.append(mat)
    return tuple(out)


def _constants(x, dim: int, where: str) -> np.ndarray:
    from .algebroid import constants_array

    if not isinstance(x, list):
        raise DocumentError("expected a list of [a, b, c, r] entries", where)
    table = []
    for k, entry in enumerate(x):
        at = f"{where}[{k}]"
        if not isinstance(entry, list) or len(entry) != 4:
            raise DocumentError("an entry is [a, b, c, r], meaning [e_b, e_c] = r e_a", at)
        a, b, c = (_index(v, dim, f"{at}[{j}]") for j, v in enumerate(entry[:3]))
        if b == c:
            raise DocumentError(f"[e{b}, e{b}] is zero by antisymmetry", at)
        table.append((a, b, c, _rational(entry[3], f"{at}[3]")))
    try:
        return constants_array(dim, table)
    except HyperCourantError as exc:
        raise DocumentError(str(exc), where) from exc


def _element(x, basis: BasisSpec, kind: str, where: str) -> GradedElement:
    gen = theta if kind == "psi" else xi
    if not isinstance(x, list):
        raise DocumentError("expected a list of [[i, j, k], r] terms", where)
    total = GradedElement.zero(basis)
    for k, term in enumerate(x):
        at = f"{where}[{k}]"
        if not isinstance(term, list) or len(term) != 2 or not isinstance(term[0], list) or len(term[0]) != 3:
            raise DocumentError("a term is [[i, j, k], r]", at)
        idx = [_index(v, basis.dim, f"{at}[0][{j}]") for j, v in enumerate(term[0])]
        mono = gen(basis, idx[0]) * gen(basis, idx[1]) * gen(basis, idx[2])
        if mono.is_zero():
            raise DocumentError(f"repeated index in {idx}", at)
        total = total + mono.scale(_rational(term[1], f"{at}[1]"))
    return total


def _epsilon(x, where: str) -> EpsilonTriple:
    signs = _three(x, where)
    for i, s in enumerate(signs):
        if isinstance(s, bool) or s not in (1, -1):
            raise DocumentError(f"a sign is 1 or -1, got {s!r}", f"{where}[{i}]")
    return EpsilonTriple(*signs)


def from_obj(obj: Any) -> InstanceDocument:
    if not isinstance(obj, dict):
        raise DocumentError("the document must be a JSON object")
    unknown = sorted(set(obj) - set(KEYS))
    if unknown:
        raise DocumentError(f"unknown keys {unknown}")
    if obj.get("schema") != SCHEMA:
        raise DocumentError(f"expected schema {SCHEMA!r}, got {obj.get('schema')!r}", "schema")
    dim = obj.get("dim")
    if isinstance(dim, bool) or not isinstance(dim, int) or dim < 1:
        raise DocumentError(f"expected a positive integer, got {dim!r}", "dim")
    basis = BasisSpec(dim)
    fields: dict[str, Any] = {"dim": dim}
    for key in ("structure_constants", "dual_structure_constants"):
        if key in obj:
            fields[key] = _constants(obj[key], dim, key)
    if "omega" in obj:
        fields["omega"] = _skew_matrices(obj["omega"], dim, "omega")
    if "pi" in obj:
        if "omega" not in obj:
            raise DocumentError("'pi' needs 'omega'", "pi")
        fields["pi"] = _skew_matrices(obj["pi"], dim, "pi")
    if "epsilon" in obj:
        fields["epsilon"] = _epsilon(obj["epsilon"], "epsilon")
    if "theta_extra" in obj:
        extra = obj["theta_extra"]
        if not isinstance(extra, dict) or not set(extra) <= {"psi", "phi"}:
            raise DocumentError("expected an object with keys among 'psi', 'phi'", "theta_extra")
        fields["theta_extra"] = {k: _element(extra[k], basis, k, f"theta_extra.{k}")
                                 for k in ("psi", "phi") if k in extra}
    if "triple" in obj:
        if "omega" in obj:
            raise DocumentError("give either 'omega' or 'triple', not both", "triple")
        fields["triple"] = tuple(_matrix(m, 2 * dim, f"triple[{i}]")
                                 for i, m in enumerate(_three(obj["triple"], "triple")))
    if "hyperkahler" in obj:
        hk = obj["hyperkahler"]
        if not isinstance(hk, dict) or set(hk) != {"T", "G"}:
            raise DocumentError("expected an object with keys 'T' and 'G'", "hyperkahler")
        fields["hyperkahler"] = {
            "T": tuple(_matrix(m, 2 * dim, f"hyperkahler.T[{i}]") for i, m in enumerate(_three(hk["T"], "hyperkahler.T"))),
            "G": _matrix(hk["G"], 2 * dim, "hyperkahler.G"),
        }
    return InstanceDocument(**fields)


def parse(text: str) -> InstanceDocument:
    """Parse and validate a document; every failure is a DocumentError."""
    try:
        obj = json.loads(text, parse_float=Decimal, parse_constant=_reject_constant,
                         object_pairs_hook=_no_duplicates)
    except json.JSONDecodeError as exc:
        lines = text.splitlines()
        context = lines[exc.lineno - 1].strip() if 0 < exc.lineno <= len(lines) else ""
        raise DocumentError(f"{exc.msg} near {context!r}", f"line {exc.lineno}, column {exc.colno}") from exc
    return from_obj(obj)


# -- emission ------------------------------------------------------------------------------


def rational_obj(x) -> dict:
    x = Fraction(x)
    return {"n": x.numerator, "d": x.denominator}


def _matrix_obj(m: np.ndarray) -> list:
    return [[rational_obj(v) for v in row] for row in m]


def _constants_obj(c: np.ndarray) -> list:
    d = c.shape[0]
    return [[a + 1, b + 1, cc + 1, rational_obj(c[a, b, cc])]
            for b in range(d) for cc in range(b + 1, d) for a in range(d) if c[a, b, cc] != 0]


def _element_obj(e: GradedElement) -> list:
    out = []
    for mono, c in e.monomials():
        idx = list(mono.up) if mono.up else list(mono.down)
        out.append([[int(i) for i in idx], rational_obj(c)])
    return out


def to_obj(doc: InstanceDocument) -> dict:
    obj: dict[str, Any] = {"schema": SCHEMA, "dim": doc.dim}
    if doc.structure_constants is not None:
        obj["structure_constants"] = _constants_obj(doc.structure_constants)
    if doc.dual_structure_constants is not None:
        obj["dual_structure_constants"] = _constants_obj(doc.dual_structure_constants)
    if doc.omega is not None:
        obj["omega"] = [_matrix_obj(m) for m in doc.omega]
    if doc.pi is not None:
        obj["pi"] = [_matrix_obj(m) for m in doc.pi]
    if doc.epsilon is not None:
        obj["epsilon"] = [doc.epsilon[i] for i in (1, 2, 3)]
    if doc.theta_extra is not None:
        obj["theta_extra"] = {k: _element_obj(v) for k, v in doc.theta_extra.items()}
    if doc.triple is not None:
        obj["triple"] = [_matrix_obj(m) for m in doc.triple]
    if doc.hyperkahler is not None:
        obj["hyperkahler"] = {"T": [_matrix_obj(m) for m in doc.hyperkahler["T"]],
                              "G": _matrix_obj(doc.hyperkahler["G"])}
    return obj


def _atomic(x) -> bool:
    return not isinstance(x, (list, dict)) or (isinstance(x, dict) and set(x) == {"n", "d"})


def dumps(obj: Any, indent: int = 0) -> str:
    """Canonical JSON: two-space indent, lists of scalars and rationals on one line."""
    pad, inner = "  " * indent, "  " * (indent + 1)
    if isinstance(obj, dict) and not _atomic(obj):
        if not obj:
            return "{}"
        items = [f"{inner}{json.dumps(k)}: {dumps(v, indent + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + pad + "}"
    if isinstance(obj, list):
        if all(_atomic(v) for v in obj):
            return "[" + ", ".join(dumps(v, indent + 1) for v in obj) + "]"
        return "[\n" + ",\n".join(inner + dumps(v, indent + 1) for v in obj) + "\n" + pad + "]"
    if isinstance(obj, dict):
        return "{" + ", ".join(f"{json.dumps(k)}: {json.dumps(v)}" for k, v in obj.items()) + "}"
    return json.dumps(obj, ensure_ascii=False)


def emit(doc: InstanceDocument) -> str:
    return dumps(to_obj(doc)) + "\n"


def digest(data: str | bytes) -> str:
    if isinstance(data, str):
        data = data.encode("utf-8")
    return "sha256:" + hashlib.sha256(data).hexdigest()


# -- building documents from objects ----------------------------------------------------------


def _constants_or_none(lie: Optional[LieStructure]) -> Optional[np.ndarray]:
    if lie is None:
        return None
    c = lie.constants()
    return None if linalg.is_zero(c) else c


def document_from(mu: Optional[LieStructure] = None, forms: Optional[FormTriple] = None,
                  gamma: Optional[LieStructure] = None, dim: Optional[int] = None) -> InstanceDocument:
    """Canonical document for a Lie structure with a form triple.

    Bivectors are written only when some π_i is not the inverse of ω_i.
    """
    if dim is None:
        dim = (mu.basis.dim if mu is not None else forms.dim)
    omega = pi = eps = None
    if forms is not None:
        omega = tuple(forms.w(i) for i in (1, 2, 3))
        if not all(forms.inverse_ok(i) for i in (1, 2, 3)):
            pi = tuple(forms.p(i) for i in (1, 2, 3))
        eps = forms.eps
    return InstanceDocument(
        dim=dim,
        structure_constants=_constants_or_none(mu),
        dual_structure_constants=_constants_or_none(gamma.as_a_side() if gamma is not None else None),
        omega=omega,
        pi=pi,
        epsilon=eps,
    )


def forms_from_triple(h: HyperTriple) -> Optional[FormTriple]:
    """Read (ω_i, π_i) back from S_i = [[0, ε_iπ_i], [ω_i, 0]] when the triple has that shape."""
    ws, ps = [], []
    for i in (1, 2, 3):
        aa, a_from_dual, dual_from_a, dualdual = h.s(i).blocks()
        if not (linalg.is_zero(aa) and linalg.is_zero(dualdual)):
            return None
        w, p = dual_from_a, a_from_dual * h.eps[i]
        if not (linalg.is_skew(w) and linalg.is_skew(p)):
            return None
        ws.append(w)
        ps.append(p)
    return FormTriple.build(ws, h.eps, ps)


def with_triple(doc: InstanceDocument, h: HyperTriple) -> InstanceDocument:
    """``doc`` with its structure section replaced by ``h``, as forms when possible."""
    base = replace(doc, omega=None, pi=None, triple=None, hyperkahler=None, theta_extra=None, epsilon=h.eps)
    forms = forms_from_triple(h)
    if forms is not None:
        pi = None if all(forms.inverse_ok(i) for i in (1, 2, 3)) else tuple(forms.p(i) for i in (1, 2, 3))
        return replace(base, omega=tuple(forms.w(i) for i in (1, 2, 3)), pi=pi)
    return replace(base, triple=tuple(h.s(i).matrix for i in (1, 2, 3)))


def with_quad(doc: InstanceDocument, q: HyperkahlerQuad) -> InstanceDocument:
    base = replace(doc, omega=None, pi=None, triple=None, theta_extra=None)
    return replace(base, hyperkahler={"T": tuple(q.t(i).matrix for i in (1, 2, 3)), "G": q.g.matrix})


__all__ = [
    "InstanceDocument",
    "KEYS",
    "SCHEMA",
    "digest",
    "document_from",
    "dumps",
    "emit",
    "forms_from_triple",
    "from_obj",
    "parse",
    "rational_obj",
    "to_obj",
    "with_quad",
    "with_triple",
]
