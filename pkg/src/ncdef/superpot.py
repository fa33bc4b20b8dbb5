"""Superpotentials: twisted cyclicity, derived relations and the CY test."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .exactlin import SparseMatrix, nullspace, rank, solve
from .multilinear import Tensor, TensorSubspace, contract_front, cyc_shift, cyclic_sign, flatten, word_index
from .quadalg import QuadraticAlgebra, hilbert_function, polynomial_dims


@dataclass
class TwistResult:
    """Outcome of :func:`find_twist`.

    ``status`` is ``"unique"``, ``"ambiguous"`` (a solution exists but the
    first flattening is rank deficient) or ``"none"``.
    """

    status: str
    q: list[list[Fraction]] | None = None

    @property
    def is_identity(self) -> bool:
        if self.status != "unique" or self.q is None:
            return False
        n = len(self.q)
        return all(self.q[i][j] == int(i == j) for i in range(n) for j in range(n))


def find_twist(phi: Tensor) -> TwistResult:
    """Solve ``cyc(phi) = s (Q (x) 1 ... (x) 1) phi`` for ``Q``, ``s = (-1)^(d-1)``.

    ``Q`` acts on the first factor by ``x_b -> sum_a Q[a][b] x_a``.
    """
    if not phi:
        raise ValueError("phi must be nonzero")
    n, d = phi.n, phi.degree
    s = cyclic_sign(d)
    target = cyc_shift(phi)
    # Unknown Q[a][b] is column a*n + b; equation per word (a, rest).
    rows: dict[int, dict[int, Fraction]] = {}
    for w, c in phi.terms.items():
        b, rest = w[0], w[1:]
        for a in range(n):
            key = word_index((a,) + rest, n)
            rows.setdefault(key, {})[a * n + b] = s * c
    keys = sorted(set(rows) | {word_index(w, n) for w in target.terms})
    pos = {k: i for i, k in enumerate(keys)}
    m = SparseMatrix.from_rows([rows.get(k, {}) for k in keys], n * n)
    rhs = {pos[word_index(w, n)]: c for w, c in target.terms.items()}
    sol = solve(m, rhs)
    if sol is None:
        return TwistResult("none")
    q = [[sol.get(a * n + b, Fraction(0)) for b in range(n)] for a in range(n)]
    if nullspace(m):
        return TwistResult("ambiguous", q)
    return TwistResult("unique", q)


def is_supercyclic(phi: Tensor) -> bool:
    return cyc_shift(phi) == phi * cyclic_sign(phi.degree)


def derived_relations(phi: Tensor) -> TensorSubspace:
    """The relation space ``d^(d-2) phi`` inside ``V (x) V``."""
    if phi.degree < 2:
        raise ValueError("need degree >= 2")
    return contract_front(phi, phi.degree - 2)


def derived_algebra(phi: Tensor) -> QuadraticAlgebra:
    return QuadraticAlgebra(phi.n, derived_relations(phi))


@dataclass
class CYReport:
    untwisted: bool
    twist_status: str
    top_derivative_dim: int
    hilbert: list[int]
    hilbert_ok: bool
    details: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return self.untwisted and self.top_derivative_dim == 4 and self.hilbert_ok

    def to_json(self) -> dict:
        return {
            "untwisted": self.untwisted,
            "twist_status": self.twist_status,
            "top_derivative_dim": self.top_derivative_dim,
            "hilbert": self.hilbert,
            "hilbert_ok": self.hilbert_ok,
            "pass": self.passed,
        }


def cy_report(phi: Tensor, K: int = 6, backend: str = "exact") -> CYReport:
    """Check cyclicity, ``dim d^(d-1) phi = n`` and the Hilbert function up to ``K``."""
    if phi.n != 4 or phi.degree != 4:
        raise ValueError("the CY criterion is implemented for n = d = 4")
    if not phi:
        return CYReport(False, "none", 0, [], False)
    tw = find_twist(phi)
    top = rank(flatten(phi, 3))
    hf = hilbert_function(derived_algebra(phi), K, backend=backend)
    return CYReport(tw.is_identity, tw.status, top, hf, hf == polynomial_dims(4, K))
