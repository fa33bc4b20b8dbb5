"""Quadratic algebras ``T(V)/(R)`` and their Hilbert functions.

The graded pieces are computed by the recursion

    A_k = (A_{k-1} (x) V) / image(A_{k-2} (x) R),

which follows from ``I_k = I_{k-1} (x) V + V^{(x)(k-2)} (x) R`` and the fact
that ``V^{(x)(k-2)} (x) R`` only matters modulo ``I_{k-2}``.  Each step is
a single elimination of ``dim A_{k-2} * dim R`` rows against
``dim A_{k-1} * n`` columns, instead of the ``n^k``-column stacked ideal
matrix.  :func:`ideal_component_matrix` builds the stacked matrix itself and
serves as the independent check.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import comb
from typing import Iterable

from .exactlin import (
    PrimeScalar,
    SparseMatrix,
    mat_inverse,
    prime_from_seed,
    rank,
    rank_mod_p,
    reduced_echelon,
)
from .multilinear import Tensor, TensorSubspace, all_words, word_index


@dataclass(frozen=True)
class QuadraticAlgebra:
    n: int
    relations: TensorSubspace

    def __post_init__(self):
        if self.relations.degree != 2 or self.relations.n != self.n:
            raise ValueError("relations must be a degree-2 subspace over the same generators")

    @classmethod
    def from_relations(cls, n: int, rels: Iterable[Tensor]) -> "QuadraticAlgebra":
        return cls(n, TensorSubspace(n, 2, rels))

    @classmethod
    def commutative(cls, n: int) -> "QuadraticAlgebra":
        rels = [
            Tensor.word(n, (i, j)) - Tensor.word(n, (j, i)) for i in range(n) for j in range(i + 1, n)
        ]
        return cls.from_relations(n, rels)

    @classmethod
    def free(cls, n: int) -> "QuadraticAlgebra":
        return cls(n, TensorSubspace(n, 2))

    def to_json(self) -> dict:
        return {"n": self.n, "relations": [t.to_json() for t in self.relations.basis]}

    @classmethod
    def from_json(cls, obj) -> "QuadraticAlgebra":
        n = int(obj["n"])
        return cls.from_relations(n, [Tensor.from_json(t) for t in obj["relations"]])


def polynomial_dims(n: int, K: int) -> list[int]:
    """Graded dimensions of the polynomial ring in ``n`` variables."""
    return [comb(k + n - 1, n - 1) for k in range(K + 1)]


# ---------------------------------------------------------------------------
# Hilbert function
# ---------------------------------------------------------------------------


def _relation_rows(a: QuadraticAlgebra, conv) -> list[list[tuple[int, int, object]]]:
    out = []
    for r in a.relations.basis:
        out.append([(w[0], w[1], conv(c)) for w, c in r.terms.items()])
    return out


def _hilbert_steps(n, rels, K, mult, dims, start, one):
    """Run the quotient recursion from degree ``start`` up to ``K``.

    ``mult`` maps a basis index of ``A_{k-2}`` and a letter to a sparse
    vector in ``A_{k-1}`` (right multiplication by a generator).
    """
    for k in range(start, K + 1):
        rows = []
        for m in range(dims[k - 2]):
            mrow = mult[m]
            for rel in rels:
                row: dict[int, object] = {}
                for a_, b_, c in rel:
                    for j, v in mrow[a_].items():
                        col = j * n + b_
                        nv = row.get(col, 0) + c * v
                        if nv:
                            row[col] = nv
                        else:
                            row.pop(col, None)
                if row:
                    rows.append(row)
        pivots = reduced_echelon(rows)
        ncols = dims[k - 1] * n
        free = [c for c in range(ncols) if c not in pivots]
        new_index = {c: i for i, c in enumerate(free)}
        new_mult = []
        for j in range(dims[k - 1]):
            entry = []
            for b in range(n):
                col = j * n + b
                if col in new_index:
                    entry.append({new_index[col]: one})
                else:
                    entry.append({new_index[c]: -v for c, v in pivots[col].items() if c != col})
            new_mult.append(entry)
        dims.append(len(free))
        mult = new_mult
    return mult


def hilbert_function(
    a: QuadraticAlgebra, K: int, backend: str = "exact", seed: int = 0, switch_degree: int = 6
) -> list[int]:
    """Dimensions ``d_0, ..., d_K`` of the graded pieces of ``a``.

    ``backend`` is ``"exact"`` (rational arithmetic throughout),
    ``"modular"`` (arithmetic modulo a prime drawn from ``seed``; each
    ``d_k`` is then an upper bound, exact with overwhelming probability) or
    ``"auto"`` (exact up to ``switch_degree``, modular above it).
    """
    if K < 0:
        raise ValueError("K must be non-negative")
    n = a.n
    if backend not in ("exact", "modular", "auto"):
        raise ValueError(f"unknown backend {backend!r}")
    dims = [1] + ([n] if K >= 1 else [])
    if K < 2:
        return dims

    def run(conv, stop, mult, start):
        rels = _relation_rows(a, conv)
        return _hilbert_steps(n, rels, stop, mult, dims, start, conv(Fraction(1)))

    def initial(conv):
        return [[{b: conv(Fraction(1))} for b in range(n)]]

    if backend == "exact" or (backend == "auto" and K <= switch_degree):
        run(lambda x: x, K, initial(lambda x: x), 2)
        return dims

    for attempt in range(8):
        p = prime_from_seed(seed, attempt)
        conv = lambda x, p=p: PrimeScalar.from_rational(x, p)  # noqa: E731
        dims[:] = [1, n]
        try:
            if backend == "modular":
                run(conv, K, initial(conv), 2)
            else:
                mult = run(lambda x: x, switch_degree, initial(lambda x: x), 2)
                mult = [[{j: conv(v) for j, v in vec.items()} for vec in entry] for entry in mult]
                run(conv, K, mult, switch_degree + 1)
        except ZeroDivisionError:
            continue
        return dims
    raise RuntimeError("could not find a prime avoiding all relation denominators")


def hilbert_matches_polynomial(a: QuadraticAlgebra, K: int, **kw) -> bool:
    return hilbert_function(a, K, **kw) == polynomial_dims(a.n, K)


# ---------------------------------------------------------------------------
# Stacked ideal matrix (independent route)
# ---------------------------------------------------------------------------


def ideal_component_matrix(a: QuadraticAlgebra, k: int) -> SparseMatrix:
    """Rows ``u (x) r (x) v`` spanning ``I_k = sum_i V^i (x) R (x) V^(k-2-i)``."""
    n = a.n
    rows = []
    rels = [list(r.terms.items()) for r in a.relations.basis]
    for i in range(k - 1):
        right = k - 2 - i
        for u in all_words(n, i):
            for v in all_words(n, right):
                for rel in rels:
                    rows.append({word_index(u + w + v, n): c for w, c in rel})
    return SparseMatrix.from_rows(rows, n**k)


def hilbert_function_stacked(a: QuadraticAlgebra, K: int, modular_seed: int | None = None) -> list[int]:
    """Slow oracle: ``d_k = n^k - rank(I_k)`` from the stacked matrices."""
    out = []
    for k in range(K + 1):
        if k < 2:
            out.append(a.n**k)
            continue
        m = ideal_component_matrix(a, k)
        r = rank(m) if modular_seed is None else rank_mod_p(m, modular_seed)
        out.append(a.n**k - r)
    return out


# ---------------------------------------------------------------------------
# Twists and base change
# ---------------------------------------------------------------------------


def zhang_twist(a: QuadraticAlgebra, sigma: list[list]) -> QuadraticAlgebra:
    """Twist by the graded automorphism ``sigma``: ``a (x) b -> a (x) sigma^-1(b)``.

    ``sigma`` is given by columns: ``sigma(x_j) = sum_i sigma[i][j] x_i``.
    """
    sigma = [[Fraction(v) for v in row] for row in sigma]
    inv = mat_inverse(sigma)
    ident = [[Fraction(int(i == j)) for j in range(a.n)] for i in range(a.n)]
    rels = [r.apply_linear([ident, inv]) for r in a.relations.basis]
    return QuadraticAlgebra.from_relations(a.n, rels)


def change_basis(a: QuadraticAlgebra, g: list[list]) -> QuadraticAlgebra:
    """The algebra with relations ``(g (x) g) R``."""
    g = [[Fraction(v) for v in row] for row in g]
    mat_inverse(g)
    return QuadraticAlgebra.from_relations(a.n, [r.apply_linear([g, g]) for r in a.relations.basis])
