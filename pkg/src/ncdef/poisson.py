"""Quadratic Poisson brackets in four variables and their one-forms.

Conventions
-----------
* A :class:`Poly` maps exponent tuples to Fractions.
* A :class:`LinearVectorField` ``W`` stores a matrix ``a`` with
  ``W(x_i) = sum_j a[i][j] x_j`` and acts on polynomials as a derivation.
* A :class:`QuadBracket` stores ``pi[(i, j)] = {x_i, x_j}`` for ``i < j``.
* One-forms ``alpha = sum alpha_i dx_i`` produce brackets through
  ``{f, g} vol = df ^ dg ^ d(alpha)`` with ``vol = dx_0 ^ ... ^ dx_3``.
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass
from fractions import Fraction
from math import comb
from typing import Iterable, Mapping, Sequence

from .exactlin import (
    SparseMatrix,
    as_scalar,
    nullspace,
    scalar_to_str,
    solve,
)

Exp = tuple[int, ...]
N = 4
PAIRS = [(i, j) for i in range(N) for j in range(i + 1, N)]
TRIPLES = [(0, 1, 2), (0, 1, 3), (0, 2, 3), (1, 2, 3)]


def monomials(n: int, degree: int) -> list[Exp]:
    """Exponent vectors of total degree ``degree``, in descending lex order."""
    out = []

    def rec(prefix, left, slots):
        if slots == 1:
            out.append(prefix + (left,))
            return
        for e in range(left, -1, -1):
            rec(prefix + (e,), left - e, slots - 1)

    if n == 0:
        return [()] if degree == 0 else []
    rec((), degree, n)
    return out


class Poly:
    """Sparse commutative polynomial with rational coefficients."""

    __slots__ = ("n", "terms")

    def __init__(self, n: int = N, terms: Mapping[Exp, object] | None = None):
        self.n = n
        clean = {}
        for e, c in (terms or {}).items():
            e = tuple(e)
            if len(e) != n:
                raise ValueError(f"exponent {e} does not have {n} entries")
            c = as_scalar(c) if not isinstance(c, Fraction) else c
            if c:
                clean[e] = c
        self.terms = clean

    # -- constructors -----------------------------------------------------

    @classmethod
    def var(cls, i: int, n: int = N) -> "Poly":
        e = [0] * n
        e[i] = 1
        return cls(n, {tuple(e): 1})

    @classmethod
    def const(cls, c, n: int = N) -> "Poly":
        return cls(n, {(0,) * n: c})

    @classmethod
    def parse(cls, text: str, n: int = N) -> "Poly":
        """Parse sums like ``"5x0^2 - 45/2 x0x1 + x1^2"``."""
        text = text.replace(" ", "").replace("*", "")
        if not text or text == "0":
            return cls(n)
        out = cls(n)
        for sign, body in re.findall(r"([+-]?)([^+-]+)", text):
            m = re.match(r"^(\d+(?:/\d+)?)?((?:x_?\{?\d+\}?(?:\^\{?\d+\}?)?)*)$", body)
            if not m:
                raise ValueError(f"cannot parse term {body!r}")
            coef = Fraction(m.group(1)) if m.group(1) else Fraction(1)
            if sign == "-":
                coef = -coef
            e = [0] * n
            for var, exp in re.findall(r"x_?\{?(\d+)\}?(?:\^\{?(\d+)\}?)?", m.group(2)):
                e[int(var)] += int(exp or 1)
            out = out + cls(n, {tuple(e): coef})
        return out

    # -- arithmetic -------------------------------------------------------

    def __add__(self, other):
        if isinstance(other, (int, Fraction)):
            other = Poly.const(other, self.n)
        terms = dict(self.terms)
        for e, c in other.terms.items():
            terms[e] = terms.get(e, 0) + c
        return Poly(self.n, terms)

    __radd__ = __add__

    def __neg__(self):
        return Poly(self.n, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, Poly):
            terms: dict[Exp, Fraction] = {}
            for e1, c1 in self.terms.items():
                for e2, c2 in other.terms.items():
                    e = tuple(a + b for a, b in zip(e1, e2))
                    terms[e] = terms.get(e, 0) + c1 * c2
            return Poly(self.n, terms)
        other = as_scalar(other)
        return Poly(self.n, {e: c * other for e, c in self.terms.items()})

    __rmul__ = __mul__

    def __pow__(self, k: int):
        out = Poly.const(1, self.n)
        for _ in range(k):
            out = out * self
        return out

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = Poly.const(other, self.n)
        if not isinstance(other, Poly):
            return NotImplemented
        return self.n == other.n and self.terms == other.terms

    def __hash__(self):
        return hash((self.n, frozenset(self.terms.items())))

    def __bool__(self):
        return bool(self.terms)

    def diff(self, i: int) -> "Poly":
        terms = {}
        for e, c in self.terms.items():
            if e[i]:
                ne = list(e)
                ne[i] -= 1
                terms[tuple(ne)] = c * e[i]
        return Poly(self.n, terms)

    def degrees(self) -> set[int]:
        return {sum(e) for e in self.terms}

    def is_homogeneous(self, degree: int | None = None) -> bool:
        ds = self.degrees()
        if not ds:
            return True
        return len(ds) == 1 and (degree is None or ds == {degree})

    def coeff(self, e: Exp) -> Fraction:
        return self.terms.get(tuple(e), Fraction(0))

    def substitute(self, images: Sequence["Poly"]) -> "Poly":
        """Replace ``x_i`` by ``images[i]``."""
        out = Poly(images[0].n if images else self.n)
        cache: dict[tuple[int, int], Poly] = {}
        for e, c in self.terms.items():
            term = Poly.const(c, out.n)
            for i, k in enumerate(e):
                if k:
                    if (i, k) not in cache:
                        cache[(i, k)] = images[i] ** k
                    term = term * cache[(i, k)]
            out = out + term
        return out

    def divides(self, other: "Poly") -> bool:
        """Exact divisibility test ``self | other`` by multivariate division."""
        return poly_divmod(other, self)[1] == Poly(self.n)

    def __repr__(self):
        return poly_to_str(self)

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "terms": [{"exp": list(e), "coeff": scalar_to_str(self.terms[e])} for e in sorted(self.terms, reverse=True)],
        }

    @classmethod
    def from_json(cls, obj) -> "Poly":
        if isinstance(obj, str):
            return cls.parse(obj)
        n = int(obj.get("n", N))
        terms: dict[Exp, Fraction] = {}
        for t in obj["terms"]:
            e = tuple(int(x) for x in t["exp"])
            terms[e] = terms.get(e, Fraction(0)) + as_scalar(t["coeff"])
        return cls(n, terms)


def poly_to_str(p: Poly) -> str:
    if not p.terms:
        return "0"
    parts = []
    for e in sorted(p.terms, reverse=True):
        c = p.terms[e]
        mono = "".join(f"x{i}" + (f"^{k}" if k > 1 else "") for i, k in enumerate(e) if k)
        sign = "-" if c < 0 else "+"
        a = abs(c)
        coef = "" if (a == 1 and mono) else str(a)
        parts.append(f"{sign} {coef}{mono}")
    s = " ".join(parts)
    return s[2:] if s.startswith("+ ") else "-" + s[2:]


def poly_divmod(f: Poly, g: Poly) -> tuple[Poly, Poly]:
    """Division by a single polynomial with lex-leading terms."""
    if not g:
        raise ZeroDivisionError("division by the zero polynomial")
    lead = max(g.terms)
    lc = g.terms[lead]
    q, r = Poly(f.n), Poly(f.n, dict(f.terms))
    rem = Poly(f.n)
    while r:
        e = max(r.terms)
        c = r.terms[e]
        if all(a >= b for a, b in zip(e, lead)):
            t = Poly(f.n, {tuple(a - b for a, b in zip(e, lead)): c / lc})
            q = q + t
            r = r - t * g
        else:
            rem = rem + Poly(f.n, {e: c})
            r = Poly(f.n, {k: v for k, v in r.terms.items() if k != e})
    return q, rem


def poly_vector(p: Poly, basis_index: Mapping[Exp, int]) -> dict[int, Fraction]:
    return {basis_index[e]: c for e, c in p.terms.items()}


# ---------------------------------------------------------------------------
# Vector fields
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class LinearVectorField:
    """``W = sum_ij a[i][j] x_j d/dx_i``, i.e. ``W(x_i) = sum_j a[i][j] x_j``."""

    a: tuple[tuple[Fraction, ...], ...]

    def __init__(self, a):
        object.__setattr__(self, "a", tuple(tuple(as_scalar(v) for v in row) for row in a))

    @classmethod
    def zero(cls, n: int = N) -> "LinearVectorField":
        return cls([[0] * n for _ in range(n)])

    @classmethod
    def euler(cls, n: int = N) -> "LinearVectorField":
        return cls([[int(i == j) for j in range(n)] for i in range(n)])

    @classmethod
    def elementary(cls, i: int, j: int, n: int = N) -> "LinearVectorField":
        return cls([[int((r, c) == (i, j)) for c in range(n)] for r in range(n)])

    @property
    def n(self) -> int:
        return len(self.a)

    def image(self, i: int) -> Poly:
        n = self.n
        return Poly(n, {tuple(int(k == j) for k in range(n)): self.a[i][j] for j in range(n)})

    def __call__(self, f: Poly) -> Poly:
        out = Poly(f.n)
        for i in range(self.n):
            if any(self.a[i]):
                out = out + self.image(i) * f.diff(i)
        return out

    def __add__(self, other: "LinearVectorField") -> "LinearVectorField":
        return LinearVectorField([[x + y for x, y in zip(r, s)] for r, s in zip(self.a, other.a)])

    def __sub__(self, other: "LinearVectorField") -> "LinearVectorField":
        return LinearVectorField([[x - y for x, y in zip(r, s)] for r, s in zip(self.a, other.a)])

    def __mul__(self, c) -> "LinearVectorField":
        c = as_scalar(c)
        return LinearVectorField([[x * c for x in r] for r in self.a])

    __rmul__ = __mul__

    def trace(self) -> Fraction:
        return sum((self.a[i][i] for i in range(self.n)), Fraction(0))

    def commutator(self, other: "LinearVectorField") -> "LinearVectorField":
        """Matrix of the operator bracket ``[self, other] = self o other - other o self``.

        On generators ``(self o other)(x_i) = sum_j other[i][j] self(x_j)``,
        so the matrix is ``other @ self - self @ other``.
        """
        n = self.n
        a, b = self.a, other.a
        return LinearVectorField(
            [[sum(b[i][k] * a[k][j] - a[i][k] * b[k][j] for k in range(n)) for j in range(n)] for i in range(n)]
        )

    def is_diagonal(self) -> bool:
        return all(self.a[i][j] == 0 for i in range(self.n) for j in range(self.n) if i != j)

    def to_json(self) -> list[list[str]]:
        return [[scalar_to_str(v) for v in row] for row in self.a]

    @classmethod
    def from_json(cls, obj) -> "LinearVectorField":
        return cls([[as_scalar(v) for v in row] for row in obj])


# ---------------------------------------------------------------------------
# Brackets
# ---------------------------------------------------------------------------


class QuadBracket:
    """Bracket table ``{x_i, x_j}`` for ``i < j``; the rest follows by antisymmetry."""

    __slots__ = ("n", "pi")

    def __init__(self, pi: Mapping[tuple[int, int], Poly] | None = None, n: int = N):
        self.n = n
        table = {}
        for (i, j), p in (pi or {}).items():
            if isinstance(p, str):
                p = Poly.parse(p, n)
            if i == j:
                if p:
                    raise ValueError("{x_i, x_i} must vanish")
                continue
            if i > j:
                i, j, p = j, i, -p
            table[(i, j)] = table.get((i, j), Poly(n)) + p
        self.pi = {k: table.get(k, Poly(n)) for k in self.pairs()}

    def pairs(self) -> list[tuple[int, int]]:
        return [(i, j) for i in range(self.n) for j in range(i + 1, self.n)]

    def get(self, i: int, j: int) -> Poly:
        if i == j:
            return Poly(self.n)
        if i < j:
            return self.pi[(i, j)]
        return -self.pi[(j, i)]

    def __add__(self, other: "QuadBracket") -> "QuadBracket":
        return QuadBracket({k: self.pi[k] + other.pi[k] for k in self.pi}, self.n)

    def __sub__(self, other: "QuadBracket") -> "QuadBracket":
        return QuadBracket({k: self.pi[k] - other.pi[k] for k in self.pi}, self.n)

    def __mul__(self, c) -> "QuadBracket":
        return QuadBracket({k: v * c for k, v in self.pi.items()}, self.n)

    __rmul__ = __mul__

    def __neg__(self):
        return self * -1

    def __eq__(self, other):
        if not isinstance(other, QuadBracket):
            return NotImplemented
        return self.n == other.n and self.pi == other.pi

    def __bool__(self):
        return any(self.pi.values())

    def is_quadratic(self) -> bool:
        return all(p.is_homogeneous(2) for p in self.pi.values())

    def coefficient_vector(self) -> dict[int, Fraction]:
        """Coordinates in the 60-dimensional space (6 pairs x 10 quadrics)."""
        mons = monomials(self.n, 2)
        idx = {m: i for i, m in enumerate(mons)}
        out = {}
        for p, (i, j) in enumerate(self.pairs()):
            for e, c in self.pi[(i, j)].terms.items():
                out[p * len(mons) + idx[e]] = c
        return out

    def __repr__(self):
        return "{" + ", ".join(f"{{x{i},x{j}}}: {self.pi[(i, j)]}" for i, j in self.pairs()) + "}"

    def to_json(self) -> dict:
        return {"pi": [{"i": i, "j": j, "poly": self.pi[(i, j)].to_json()} for i, j in self.pairs()]}

    @classmethod
    def from_json(cls, obj) -> "QuadBracket":
        table = {}
        for e in obj["pi"]:
            table[(int(e["i"]), int(e["j"]))] = Poly.from_json(e["poly"])
        return cls(table)


def euler_wedge(z: LinearVectorField, n: int = N) -> QuadBracket:
    """The bracket ``{f, g} = Z(f) E(g) - E(f) Z(g)``."""
    xs = [Poly.var(i, n) for i in range(n)]
    return QuadBracket({(i, j): z.image(i) * xs[j] - xs[i] * z.image(j) for i in range(n) for j in range(i + 1, n)}, n)


def wedge_bracket(x: LinearVectorField, y: LinearVectorField) -> QuadBracket:
    """``{f, g} = X(f) Y(g) - Y(f) X(g)`` for linear fields."""
    n = x.n
    return QuadBracket(
        {(i, j): x.image(i) * y.image(j) - y.image(i) * x.image(j) for i in range(n) for j in range(i + 1, n)}, n
    )


def bracket_eval(b: QuadBracket, f: Poly, g: Poly) -> Poly:
    """Biderivation extension: ``{f,g} = sum_{i<j} pi_ij (d_i f d_j g - d_j f d_i g)``."""
    out = Poly(b.n)
    df = [f.diff(i) for i in range(b.n)]
    dg = [g.diff(i) for i in range(b.n)]
    for (i, j), p in b.pi.items():
        if p:
            out = out + p * (df[i] * dg[j] - df[j] * dg[i])
    return out


def jacobiator(b: QuadBracket) -> list[Poly]:
    """``J(i,j,k)`` for every increasing triple; all zero iff ``b`` is Poisson."""
    xs = [Poly.var(i, b.n) for i in range(b.n)]
    out = []
    for i, j, k in itertools.combinations(range(b.n), 3):
        out.append(
            bracket_eval(b, xs[i], b.get(j, k))
            + bracket_eval(b, xs[j], b.get(k, i))
            + bracket_eval(b, xs[k], b.get(i, j))
        )
    return out


def is_poisson(b: QuadBracket) -> bool:
    return not any(jacobiator(b))


def unimodularity_defect(b: QuadBracket) -> list[Poly]:
    """Divergence ``sum_i d_i pi_ij`` for each ``j``."""
    return [
        sum((b.get(i, j).diff(i) for i in range(b.n)), Poly(b.n)) for j in range(b.n)
    ]


def is_unimodular(b: QuadBracket) -> bool:
    return not any(unimodularity_defect(b))


def lie_derivative(b: QuadBracket, w: LinearVectorField) -> QuadBracket:
    """``(L_W pi)_ij = W(pi_ij) - pi(d W x_i, dx_j) - pi(dx_i, d W x_j)``."""
    n = b.n
    out = {}
    for i, j in b.pairs():
        p = w(b.get(i, j))
        for k in range(n):
            if w.a[i][k]:
                p = p - b.get(k, j) * w.a[i][k]
            if w.a[j][k]:
                p = p - b.get(i, k) * w.a[j][k]
        out[(i, j)] = p
    return QuadBracket(out, n)


def transform_bracket(b: QuadBracket, g: Sequence[Sequence]) -> QuadBracket:
    """Push ``b`` forward along the linear substitution ``x_j -> sum_i g[i][j] x_i``.

    The result ``b'`` satisfies ``phi({f, h}) = b'(phi f, phi h)`` where
    ``phi`` is the algebra map ``x_j -> sum_i g[i][j] x_i``.
    """
    from .exactlin import mat_inverse

    n = b.n
    g = [[as_scalar(v) for v in row] for row in g]
    ginv = mat_inverse(g)
    imgs = [Poly(n, {tuple(int(k == i) for k in range(n)): g[i][j] for i in range(n)}) for j in range(n)]
    # phi(x_j) = imgs[j]; new bracket on x_a: x_a = phi(sum_j ginv[j][a] x_j)
    mapped = {(i, j): b.get(i, j).substitute(imgs) for i in range(n) for j in range(n)}
    out = {}
    for a_, c_ in b.pairs():
        p = Poly(n)
        for i in range(n):
            if not ginv[i][a_]:
                continue
            for j in range(n):
                if ginv[j][c_] and i != j:
                    p = p + mapped[(i, j)] * (ginv[i][a_] * ginv[j][c_])
        out[(a_, c_)] = p
    return QuadBracket(out, n)


def transform_field(w: LinearVectorField, g: Sequence[Sequence]) -> LinearVectorField:
    """Conjugate a linear field by the substitution used in :func:`transform_bracket`."""
    from .exactlin import mat_inverse, mat_mul

    g = [[as_scalar(v) for v in row] for row in g]
    ginv = mat_inverse(g)
    a = [list(r) for r in w.a]
    # phi(x_j) = sum_i g[i][j] y_i, so x = g^T y and y = ginv^T x.
    gt = [list(r) for r in zip(*g)]
    git = [list(r) for r in zip(*ginv)]
    return LinearVectorField(mat_mul(mat_mul(git, a), gt))


# ---------------------------------------------------------------------------
# One-forms
# ---------------------------------------------------------------------------


def _perm_sign(seq: Sequence[int]) -> int:
    seq = list(seq)
    sign = 1
    for i in range(len(seq)):
        for j in range(i + 1, len(seq)):
            if seq[i] > seq[j]:
                sign = -sign
    return sign


@dataclass(frozen=True)
class OneForm:
    alpha: tuple[Poly, Poly, Poly, Poly]

    def __init__(self, alpha: Iterable[Poly]):
        alpha = tuple(Poly.parse(a) if isinstance(a, str) else a for a in alpha)
        if len(alpha) != N:
            raise ValueError("a one-form needs four coefficients")
        object.__setattr__(self, "alpha", alpha)

    def __add__(self, other: "OneForm") -> "OneForm":
        return OneForm(a + b for a, b in zip(self.alpha, other.alpha))

    def __mul__(self, c) -> "OneForm":
        return OneForm(a * c for a in self.alpha)

    __rmul__ = __mul__

    def d(self) -> dict[tuple[int, int], Poly]:
        """Coefficients of ``d alpha`` on ``dx_k ^ dx_l`` for ``k < l``."""
        return {(k, l): self.alpha[l].diff(k) - self.alpha[k].diff(l) for k, l in PAIRS}

    def euler_contraction(self) -> Poly:
        return sum((Poly.var(i) * a for i, a in enumerate(self.alpha)), Poly())

    def integrability(self) -> list[Poly]:
        """Components of ``alpha ^ d alpha`` on ``dx_i ^ dx_j ^ dx_k`` (increasing)."""
        da = self.d()

        def dcoef(k, l):
            return da[(k, l)] if k < l else -da[(l, k)]

        out = []
        for i, j, k in TRIPLES:
            out.append(self.alpha[i] * dcoef(j, k) - self.alpha[j] * dcoef(i, k) + self.alpha[k] * dcoef(i, j))
        return out

    def __eq__(self, other):
        if not isinstance(other, OneForm):
            return NotImplemented
        return self.alpha == other.alpha

    def __repr__(self):
        return " + ".join(f"({a}) dx{i}" for i, a in enumerate(self.alpha))

    def to_json(self) -> dict:
        return {"alpha": [a.to_json() for a in self.alpha]}

    @classmethod
    def from_json(cls, obj) -> "OneForm":
        return cls(Poly.from_json(a) for a in obj["alpha"])


@dataclass
class OneFormReport:
    cubic: bool
    euler_contraction_zero: bool
    integrable: bool

    @property
    def ok(self) -> bool:
        return self.cubic and self.euler_contraction_zero and self.integrable


def oneform_validate(a: OneForm) -> OneFormReport:
    return OneFormReport(
        cubic=all(p.is_homogeneous(3) for p in a.alpha),
        euler_contraction_zero=not a.euler_contraction(),
        integrable=not any(a.integrability()),
    )


def bracket_from_oneform(a: OneForm, check: bool = True) -> QuadBracket:
    """``{x_i, x_j} = sign(i,j,k,l) (d_k alpha_l - d_l alpha_k)``."""
    if check:
        rep = oneform_validate(a)
        if not rep.ok:
            raise ValueError(f"invalid one-form: {rep}")
    da = a.d()
    out = {}
    for i, j in PAIRS:
        k, l = [m for m in range(N) if m not in (i, j)]
        out[(i, j)] = da[(k, l)] * _perm_sign((i, j, k, l))
    return QuadBracket(out)


class NotUnimodularPoisson(ValueError):
    pass


def oneform_from_bracket(b: QuadBracket) -> OneForm:
    """The unique cubic one-form with zero Euler contraction producing ``b``."""
    cubics = monomials(N, 3)
    quads = monomials(N, 2)
    quartics = monomials(N, 4)
    cidx = {m: i for i, m in enumerate(cubics)}
    qidx = {m: i for i, m in enumerate(quads)}
    tidx = {m: i for i, m in enumerate(quartics)}
    nc = len(cubics)

    def var(comp, mono):
        return comp * nc + cidx[mono]

    rows: list[dict[int, Fraction]] = []
    rhs: dict[int, Fraction] = {}
    # Bracket equations: sign * (d_k alpha_l - d_l alpha_k) = pi_ij.
    for p, (i, j) in enumerate(PAIRS):
        k, l = [m for m in range(N) if m not in (i, j)]
        s = _perm_sign((i, j, k, l))
        eqs: dict[int, dict[int, Fraction]] = {}
        for comp, dvar, sg in ((l, k, s), (k, l, -s)):
            for mono in cubics:
                if mono[dvar]:
                    e = list(mono)
                    e[dvar] -= 1
                    row = eqs.setdefault(qidx[tuple(e)], {})
                    row[var(comp, mono)] = row.get(var(comp, mono), Fraction(0)) + sg * mono[dvar]
        target = b.get(i, j)
        for q in quads:
            r = len(rows)
            rows.append(eqs.get(qidx[q], {}))
            c = target.coeff(q)
            if c:
                rhs[r] = c
    # Euler contraction: sum_i x_i alpha_i = 0.
    euler: dict[int, dict[int, Fraction]] = {}
    for comp in range(N):
        for mono in cubics:
            e = list(mono)
            e[comp] += 1
            euler.setdefault(tidx[tuple(e)], {})[var(comp, mono)] = Fraction(1)
    for t in range(len(quartics)):
        rows.append(euler.get(t, {}))
    m = SparseMatrix.from_rows(rows, N * nc)
    sol = solve(m, rhs)
    if sol is None:
        raise NotUnimodularPoisson("no one-form produces this bracket")
    return OneForm(
        Poly(N, {cubics[i]: sol[comp * nc + i] for i in range(nc) if sol.get(comp * nc + i)}) for comp in range(N)
    )


# ---------------------------------------------------------------------------
# Unimodular decomposition
# ---------------------------------------------------------------------------


@dataclass
class Decomposition:
    unimodular: QuadBracket
    z: LinearVectorField
    z_is_symmetry: bool


class InconsistentDecomposition(ValueError):
    pass


def decompose_unimodular(b: QuadBracket) -> Decomposition:
    """Split ``b = pi_u + (Z(f)E(g) - E(f)Z(g))`` with ``pi_u`` unimodular.

    ``Z`` is only determined modulo the Euler field (which contributes
    nothing), so the traceless representative is returned.
    """
    n = b.n
    lin = monomials(n, 1)
    lidx = {m: i for i, m in enumerate(lin)}
    # Unknowns z[a][c] -> column a*n + c, plus the trace constraint.
    rows: list[dict[int, Fraction]] = []
    rhs: dict[int, Fraction] = {}
    target = unimodularity_defect(b)
    cols = n * n
    for a_ in range(n):
        for c_ in range(n):
            e = LinearVectorField.elementary(a_, c_, n)
            d = unimodularity_defect(euler_wedge(e, n))
            for j in range(n):
                for mono, v in d[j].terms.items():
                    key = j * n + lidx[mono]
                    while len(rows) <= key:
                        rows.append({})
                    rows[key][a_ * n + c_] = v
    for j in range(n):
        for mono, v in target[j].terms.items():
            rhs[j * n + lidx[mono]] = v
    while len(rows) < n * n:
        rows.append({})
    rows.append({i * n + i: Fraction(1) for i in range(n)})
    sol = solve(SparseMatrix.from_rows(rows, cols), rhs)
    if sol is None:
        raise InconsistentDecomposition("no linear field removes the divergence")
    z = LinearVectorField([[sol.get(a_ * n + c_, Fraction(0)) for c_ in range(n)] for a_ in range(n)])
    unim = b - euler_wedge(z, n)
    return Decomposition(unim, z, not lie_derivative(unim, z))


# ---------------------------------------------------------------------------
# Relative invariants
# ---------------------------------------------------------------------------


def _field_matrix(w: LinearVectorField, degree: int) -> tuple[list[Exp], SparseMatrix]:
    mons = monomials(w.n, degree)
    idx = {m: i for i, m in enumerate(mons)}
    data: dict[int, dict[int, Fraction]] = {}
    for c, m in enumerate(mons):
        img = w(Poly(w.n, {m: 1}))
        for e, v in img.terms.items():
            data.setdefault(idx[e], {})[c] = v
    return mons, SparseMatrix(len(mons), len(mons), data)


def _rational_eigenvalues(x: LinearVectorField) -> list[Fraction]:
    if x.is_diagonal():
        return sorted(set(x.a[i][i] for i in range(x.n)))
    import sympy

    vals = sympy.Matrix([[sympy.Rational(v.numerator, v.denominator) for v in row] for row in x.a]).eigenvals()
    return sorted(Fraction(int(v.p), int(v.q)) for v in vals if v.is_rational)


def relative_invariants(
    x: LinearVectorField, y: LinearVectorField, degree: int
) -> tuple[Fraction, list[Poly]]:
    """Largest joint eigenspace ``{f : Y f = 0, X f = w f}`` in a given degree.

    Ties between eigenvalues are broken towards the smaller ``w``.
    """
    n = x.n
    mons = monomials(n, degree)
    if degree == 0:
        return Fraction(0), [Poly.const(1, n)]
    _, ym = _field_matrix(y, degree)
    _, xm = _field_matrix(x, degree)
    ev = _rational_eigenvalues(x)
    candidates = sorted({sum(c, Fraction(0)) for c in itertools.combinations_with_replacement(ev, degree)})
    best: tuple[Fraction, list[dict[int, Fraction]]] | None = None
    for w in candidates:
        rows = [dict(ym.row(r)) for r in range(ym.rows)]
        for r in range(xm.rows):
            row = dict(xm.row(r))
            row[r] = row.get(r, 0) - w
            if not row[r]:
                del row[r]
            rows.append(row)
        ker = nullspace(SparseMatrix.from_rows(rows, len(mons)))
        if ker and (best is None or len(ker) > len(best[1])):
            best = (w, ker)
    if best is None:
        return Fraction(0), []
    w, ker = best
    return w, [Poly(n, {mons[i]: v for i, v in vec.items()}) for vec in ker]


def monomial_count(n: int, degree: int) -> int:
    return comb(degree + n - 1, n - 1)
