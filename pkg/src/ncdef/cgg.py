"""Star products from a pair of linear derivations with ``[Y, X] = Y``.

``f * g = sum_k hbar^k Y^k(f) binom(X, k)(g)``.  When ``Y`` is nilpotent the
sum is finite on every polynomial, so ``hbar`` can be any rational number.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from fractions import Fraction
from math import factorial, lcm
from typing import Sequence

from .exactlin import SparseMatrix, as_scalar, nullspace, rank, rref
from .multilinear import Tensor
from .poisson import LinearVectorField, Poly, QuadBracket, monomials
from .quadalg import QuadraticAlgebra


@dataclass(frozen=True)
class DerivationPair:
    x: LinearVectorField
    y: LinearVectorField

    @property
    def n(self) -> int:
        return self.x.n

    def to_json(self) -> dict:
        return {"x": self.x.to_json(), "y": self.y.to_json()}

    @classmethod
    def from_json(cls, obj) -> "DerivationPair":
        return cls(LinearVectorField.from_json(obj["x"]), LinearVectorField.from_json(obj["y"]))


def e3_pair() -> DerivationPair:
    # X = diag(-5/4, -1/4, 3/4, 7/4); Y shifts x_{i-1} -> x_i with weight 4.
    x = LinearVectorField([[Fraction(4 * i - 5, 4) if i == j else 0 for j in range(4)] for i in range(4)])
    y = LinearVectorField([[4 if j == i - 1 else 0 for j in range(4)] for i in range(4)])
    return DerivationPair(x, y)


def _mat_pow_zero(a, m: int) -> bool:
    n = len(a)
    p = [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]
    for _ in range(m):
        p = [[sum(p[i][k] * a[k][j] for k in range(n)) for j in range(n)] for i in range(n)]
    return all(v == 0 for row in p for v in row)


@dataclass
class PairReport:
    bracket_identity: bool
    nilpotency_index: int | None
    locally_nilpotent_to_degree: bool

    @property
    def valid(self) -> bool:
        return self.bracket_identity and self.nilpotency_index is not None and self.locally_nilpotent_to_degree

    def to_json(self) -> dict:
        return {
            "bracket_identity": self.bracket_identity,
            "nilpotency_index": self.nilpotency_index,
            "locally_nilpotent_to_degree": self.locally_nilpotent_to_degree,
            "valid": self.valid,
        }


def validate_pair(p: DerivationPair, degree_bound: int = 3) -> PairReport:
    """Check ``[Y, X] = Y`` and nilpotency of ``Y`` (index ``<= n``)."""
    ident = p.y.commutator(p.x) == p.y
    index = next((m for m in range(1, p.n + 1) if _mat_pow_zero(p.y.a, m)), None)
    local = True
    if index is not None:
        for d in range(1, degree_bound + 1):
            bound = d * (index - 1) + 1
            for m in monomials(p.n, d):
                f = Poly(p.n, {m: 1})
                for _ in range(bound):
                    f = p.y(f)
                if f:
                    local = False
    else:
        local = False
    return PairReport(ident, index, local)


def binom_apply(x: LinearVectorField, k: int, g: Poly) -> Poly:
    """``binom(X, k)(g) = X(X-1)...(X-k+1) g / k!``, applying ``X-(k-1)`` first."""
    h = g
    for m in range(k - 1, -1, -1):
        h = x(h) - h * m
    return h * Fraction(1, factorial(k))


def star_terms(p: DerivationPair, f: Poly, g: Poly) -> list[Poly]:
    """Coefficients of ``hbar^k`` in ``f * g``."""
    out = []
    yk = f
    k = 0
    while yk:
        out.append(yk * binom_apply(p.x, k, g))
        yk = p.y(yk)
        k += 1
    return out or [Poly(f.n)]


def star(p: DerivationPair, f: Poly, g: Poly, hbar=1) -> Poly:
    hbar = as_scalar(hbar)
    out = Poly(f.n)
    for k, t in enumerate(star_terms(p, f, g)):
        out = out + t * hbar**k
    return out


def star_commutator_bracket(p: DerivationPair) -> QuadBracket:
    """First-order part of ``x_i * x_j - x_j * x_i``: ``Y(x_i)X(x_j) - Y(x_j)X(x_i)``."""
    n = p.n
    return QuadBracket(
        {
            (i, j): p.y.image(i) * p.x.image(j) - p.y.image(j) * p.x.image(i)
            for i in range(n)
            for j in range(i + 1, n)
        },
        n,
    )


def _random_poly(rng: random.Random, n: int, max_degree: int) -> Poly:
    terms = {}
    for _ in range(rng.randint(1, 4)):
        d = rng.randint(0, max_degree)
        e = [0] * n
        for _ in range(d):
            e[rng.randrange(n)] += 1
        terms[tuple(e)] = Fraction(rng.randint(-5, 5), rng.randint(1, 4))
    return Poly(n, terms)


def associativity_defect(
    s: DerivationPair, hbar=1, degree_bound: int = 2, seed: int = 0, random_triples: int = 20
) -> list[Poly]:
    """``(f*g)*h - f*(g*h)`` over all generator triples plus seeded random triples."""
    n = s.n
    xs = [Poly.var(i, n) for i in range(n)]
    triples = list(itertools.product(xs, repeat=3))
    rng = random.Random(seed)
    triples += [tuple(_random_poly(rng, n, degree_bound) for _ in range(3)) for _ in range(random_triples)]
    out = []
    for f, g, h in triples:
        out.append(star(s, star(s, f, g, hbar), h, hbar) - star(s, f, star(s, g, h, hbar), hbar))
    return out


class DegeneratePresentation(ValueError):
    pass


def _multiplication_matrix(p: DerivationPair, hbar) -> tuple[SparseMatrix, list]:
    n = p.n
    quads = monomials(n, 2)
    qidx = {m: i for i, m in enumerate(quads)}
    xs = [Poly.var(i, n) for i in range(n)]
    data: dict[int, dict[int, Fraction]] = {}
    for i, j in itertools.product(range(n), repeat=2):
        prod = star(p, xs[i], xs[j], hbar)
        for e, c in prod.terms.items():
            data.setdefault(qidx[e], {})[i * n + j] = c
    return SparseMatrix(len(quads), n * n, data), quads


def star_presentation(p: DerivationPair, hbar=1) -> QuadraticAlgebra:
    """Relations = kernel of ``x_i (x) x_j -> x_i * x_j`` in degree 2.

    Taking the kernel avoids choosing lifts: ``x_1 * x_1`` is not ``x_1^2``
    for the E(3) pair, so the naive symmetric lift of a commutator is not a
    relation in general.
    """
    n = p.n
    m, _ = _multiplication_matrix(p, hbar)
    ker = nullspace(m)
    if len(ker) != n * (n - 1) // 2:
        raise DegeneratePresentation(f"kernel has dimension {len(ker)}")
    rels = [Tensor(n, 2, {(c // n, c % n): v for c, v in vec.items()}) for vec in ker]
    return QuadraticAlgebra.from_relations(n, rels)


def star_map_tensor(p: DerivationPair, t: Tensor, hbar=1) -> Poly:
    """Image of a degree-2 tensor under ``a (x) b -> a * b``."""
    out = Poly(p.n)
    for (i, j), c in t.terms.items():
        out = out + star(p, Poly.var(i, p.n), Poly.var(j, p.n), hbar) * c
    return out


# ---------------------------------------------------------------------------
# Rescaling
# ---------------------------------------------------------------------------


@dataclass
class RescalingReport:
    supported: bool
    hbar_prime: Fraction | None = None
    exponents: list[int] = field(default_factory=list)
    checked: int = 0
    mismatches: int = 0

    @property
    def ok(self) -> bool:
        return self.supported and self.mismatches == 0

    def to_json(self) -> dict:
        return {
            "supported": self.supported,
            "hbar_prime": None if self.hbar_prime is None else str(self.hbar_prime),
            "exponents": self.exponents,
            "checked": self.checked,
            "mismatches": self.mismatches,
            "ok": self.ok,
        }


def rescaling_iso_check(p: DerivationPair, mu, hbar, degree_bound: int = 3) -> RescalingReport:
    """Check that ``x_i -> mu^{m_i} x_i`` intertwines ``*_hbar`` with ``*_hbar'``.

    ``m`` is the smallest integer multiple of the eigenvalues of ``X``; the
    new parameter is read off from the first-order part of one generator
    commutator and then checked against every product of monomials of
    total degree ``<= degree_bound``.
    """
    mu, hbar = as_scalar(mu), as_scalar(hbar)
    if not p.x.is_diagonal() or mu == 0:
        return RescalingReport(False)
    n = p.n
    lam = [p.x.a[i][i] for i in range(n)]
    scale = lcm(*[v.denominator for v in lam])
    m = [int(v * scale) for v in lam]

    def phi(f: Poly) -> Poly:
        return Poly(n, {e: c * mu ** sum(k * mi for k, mi in zip(e, m)) for e, c in f.terms.items()})

    xs = [Poly.var(i, n) for i in range(n)]
    hbar_prime = None
    for i, j in itertools.product(range(n), repeat=2):
        lhs = star_terms(p, xs[i], xs[j])
        rhs = star_terms(p, phi(xs[i]), phi(xs[j]))
        if len(lhs) > 1 and lhs[1]:
            target = phi(lhs[1]) * hbar
            e = next(iter(rhs[1].terms))
            hbar_prime = target.coeff(e) / rhs[1].coeff(e)
            break
    if hbar_prime is None:
        hbar_prime = hbar
    mons = [Poly(n, {e: 1}) for d in range(1, degree_bound) for e in monomials(n, d)]
    checked = mismatches = 0
    for f in mons:
        for g in mons:
            df = next(iter(f.degrees()))
            dg = next(iter(g.degrees()))
            if df + dg > degree_bound:
                continue
            checked += 1
            if phi(star(p, f, g, hbar)) != star(p, phi(f), phi(g), hbar_prime):
                mismatches += 1
    return RescalingReport(True, hbar_prime, m, checked, mismatches)


# ---------------------------------------------------------------------------
# Invariant curves and ideals
# ---------------------------------------------------------------------------

CURVE_START = {"cubic": 0, "conic": 1, "line": 2}


def _upoly_mul(a: list[Fraction], b: list[Fraction]) -> list[Fraction]:
    out = [Fraction(0)] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] += x * y
    return out


def orbit_curve(p: DerivationPair, start: int) -> list[list[Fraction]]:
    """Coordinates of ``exp(t Y) e_start`` as polynomials in ``t`` (coefficient lists)."""
    n = p.n
    a = p.y.a
    vec = [Fraction(int(i == start)) for i in range(n)]
    coords = [[v] for v in vec]
    term = vec
    k = 1
    while True:
        term = [sum(a[i][j] * term[j] for j in range(n)) / k for i in range(n)]
        if not any(term):
            break
        for i in range(n):
            coords[i].append(term[i])
        k += 1
        if k > n + 1:
            raise ValueError("Y is not nilpotent")
    width = max(len(c) for c in coords)
    return [c + [Fraction(0)] * (width - len(c)) for c in coords]


def curve_ideal(kind: str, pair: DerivationPair | None = None, degree: int = 2) -> list[Poly]:
    """Degree-``degree`` forms vanishing on the orbit curve through a coordinate point.

    For the E(3) pair the orbit through ``e_0`` is the twisted cubic, through
    ``e_1`` a conic in ``x_0 = 0`` and through ``e_2`` the line
    ``x_0 = x_1 = 0``.
    """
    if kind not in CURVE_START:
        raise ValueError(f"unknown curve {kind!r}; expected one of {sorted(CURVE_START)}")
    pair = pair or e3_pair()
    n = pair.n
    curve = orbit_curve(pair, CURVE_START[kind])
    mons = monomials(n, degree)
    columns = []
    for e in mons:
        val = [Fraction(1)]
        for i, k in enumerate(e):
            for _ in range(k):
                val = _upoly_mul(val, curve[i])
        columns.append(val)
    height = max(len(c) for c in columns)
    rows = [{c: col[r] for c, col in enumerate(columns) if r < len(col) and col[r]} for r in range(height)]
    ker = nullspace(SparseMatrix.from_rows(rows, len(mons)))
    return [Poly(n, {mons[i]: v for i, v in vec.items()}) for vec in ker]


def _component_rows(gens: Sequence[Poly], degree: int, n: int, idx) -> list[dict[int, Fraction]]:
    rows = []
    for g in gens:
        dg = next(iter(g.degrees()))
        if dg > degree:
            continue
        for m in monomials(n, degree - dg):
            prod = g * Poly(n, {m: 1})
            rows.append({idx[e]: c for e, c in prod.terms.items()})
    return rows


@dataclass
class IdealReport:
    lie_stable: bool
    star_closed: bool
    failures: list[str] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return self.lie_stable and self.star_closed

    def to_json(self) -> dict:
        return {
            "lie_stable": self.lie_stable,
            "star_closed": self.star_closed,
            "pass": self.passed,
            "failures": self.failures[:10],
        }


def equivariant_ideal_check(
    p: DerivationPair, generators: Sequence[Poly], degree_bound: int, hbar=1
) -> IdealReport:
    """Check that the ideal generated by ``generators`` is stable and two-sided for ``*``."""
    n = p.n
    for g in generators:
        if not g or not g.is_homogeneous():
            raise ValueError("generators must be nonzero homogeneous polynomials")
    comps = {}
    for d in range(degree_bound + 2):
        mons = monomials(n, d)
        idx = {m: i for i, m in enumerate(mons)}
        rows = _component_rows(generators, d, n, idx)

        r, basis = rref(SparseMatrix.from_rows(rows, len(mons)))
        comps[d] = (idx, basis, r)

    def member(f: Poly, d: int) -> bool:
        if not f:
            return True
        idx, basis, r = comps[d]
        rows = [dict(basis.row(i)) for i in range(basis.rows)] + [{idx[e]: c for e, c in f.terms.items()}]
        return rank(SparseMatrix.from_rows(rows, len(idx))) == r

    def elements(d: int) -> list[Poly]:
        idx, basis, _ = comps[d]
        inv = {i: m for m, i in idx.items()}
        return [Poly(n, {inv[c]: v for c, v in basis.row(i).items()}) for i in range(basis.rows)]

    failures = []
    lie = True
    for d in range(degree_bound + 1):
        for f in elements(d):
            for name, w in (("X", p.x), ("Y", p.y)):
                if not member(w(f), d):
                    lie = False
                    failures.append(f"{name}({f}) not in ideal")
    closed = True
    xs = [Poly.var(i, n) for i in range(n)]
    for d in range(degree_bound + 1):
        for f in elements(d):
            for i, x in enumerate(xs):
                for side, prod in (("left", star(p, x, f, hbar)), ("right", star(p, f, x, hbar))):
                    if not member(prod, d + 1):
                        closed = False
                        failures.append(f"{side} product of x{i} with {f} leaves the ideal")
    return IdealReport(lie, closed, failures)
