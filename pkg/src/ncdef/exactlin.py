"""Exact scalars and sparse linear algebra.

Rationals are plain :class:`fractions.Fraction`.  Two extra scalar types
live here: :class:`DualScalar` (first-order jets ``a + b*eps`` with
``eps**2 == 0``) and :class:`PrimeScalar` (residues modulo a large prime,
used as a fast Monte Carlo rank backend).

Matrices are stored row-wise as ``{row: {col: value}}`` with no explicit
zeros.  Elimination is sparse and works over any field whose elements
support ``+ - * /`` (``Fraction`` or ``PrimeScalar``).
"""

from __future__ import annotations

import random
from math import gcd, lcm
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping

Scalar = Fraction

# 2**61 - 1 is prime; the seeded draws below search upward from random
# 62-bit odd numbers so every drawn modulus exceeds 2**60.
MERSENNE_61 = (1 << 61) - 1
_MIN_PRIME = 1 << 60


def as_scalar(x) -> Fraction:
    """Coerce ints, Fractions and ``"p/q"`` strings to a Fraction."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, bool):
        raise TypeError("booleans are not scalars")
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x.strip())
    raise TypeError(f"cannot interpret {x!r} as an exact rational")


def scalar_to_str(x: Fraction) -> str:
    x = as_scalar(x)
    return f"{x.numerator}/{x.denominator}"


# ---------------------------------------------------------------------------
# Dual numbers
# ---------------------------------------------------------------------------


class DualScalar:
    """An element ``value + epsilon * eps`` of Q[eps]/(eps^2)."""

    __slots__ = ("value", "epsilon")

    def __init__(self, value=0, epsilon=0):
        self.value = as_scalar(value)
        self.epsilon = as_scalar(epsilon)

    @classmethod
    def eps(cls) -> "DualScalar":
        return cls(0, 1)

    @staticmethod
    def _lift(other) -> "DualScalar | None":
        if isinstance(other, DualScalar):
            return other
        if isinstance(other, (int, Fraction)) and not isinstance(other, bool):
            return DualScalar(other, 0)
        return None

    def __add__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        return DualScalar(self.value + o.value, self.epsilon + o.epsilon)

    __radd__ = __add__

    def __neg__(self):
        return DualScalar(-self.value, -self.epsilon)

    def __sub__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        return DualScalar(self.value - o.value, self.epsilon - o.epsilon)

    def __rsub__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        return o - self

    def __mul__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        return DualScalar(
            self.value * o.value, self.value * o.epsilon + self.epsilon * o.value
        )

    __rmul__ = __mul__

    def inverse(self) -> "DualScalar":
        if self.value == 0:
            raise ZeroDivisionError("dual number with zero value part is not invertible")
        inv = 1 / self.value
        return DualScalar(inv, -self.epsilon * inv * inv)

    def __truediv__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        return self * o.inverse()

    def __rtruediv__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        return o * self.inverse()

    def __pow__(self, k: int):
        if not isinstance(k, int):
            return NotImplemented
        if k < 0:
            return self.inverse() ** (-k)
        # (a + b eps)^k = a^k + k a^(k-1) b eps
        if k == 0:
            return DualScalar(1, 0)
        return DualScalar(self.value**k, k * self.value ** (k - 1) * self.epsilon)

    def __eq__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        return self.value == o.value and self.epsilon == o.epsilon

    def __hash__(self):
        if self.epsilon == 0:
            return hash(self.value)
        return hash((self.value, self.epsilon))

    def __bool__(self):
        return bool(self.value) or bool(self.epsilon)

    def __repr__(self):
        return f"DualScalar({self.value}, {self.epsilon})"


# ---------------------------------------------------------------------------
# Prime field
# ---------------------------------------------------------------------------


def _is_probable_prime(n: int) -> bool:
    if n < 2:
        return False
    small = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)
    for p in small:
        if n % p == 0:
            return n == p
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    # Deterministic for n < 3.3e24 with these bases.
    for a in small:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def prime_from_seed(seed: int, attempt: int = 0) -> int:
    """Deterministically map ``(seed, attempt)`` to a prime in (2^60, 2^62)."""
    rng = random.Random(f"ncdef-prime:{seed}:{attempt}")
    n = rng.randrange(_MIN_PRIME, 1 << 62) | 1
    while not _is_probable_prime(n):
        n += 2
    return n


@dataclass(frozen=True, slots=True)
class PrimeScalar:
    residue: int
    modulus: int = MERSENNE_61

    def __post_init__(self):
        if not 0 <= self.residue < self.modulus:
            object.__setattr__(self, "residue", self.residue % self.modulus)

    @classmethod
    def from_rational(cls, x, modulus: int = MERSENNE_61) -> "PrimeScalar":
        x = as_scalar(x)
        if x.denominator % modulus == 0:
            raise ZeroDivisionError(f"{modulus} divides the denominator of {x}")
        return cls(x.numerator * pow(x.denominator, -1, modulus) % modulus, modulus)

    def _coerce(self, other) -> int | None:
        if isinstance(other, PrimeScalar):
            if other.modulus != self.modulus:
                raise ValueError("mixed moduli")
            return other.residue
        if isinstance(other, int) and not isinstance(other, bool):
            return other % self.modulus
        if isinstance(other, Fraction):
            return PrimeScalar.from_rational(other, self.modulus).residue
        return None

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return PrimeScalar((self.residue + o) % self.modulus, self.modulus)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return PrimeScalar((self.residue - o) % self.modulus, self.modulus)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return PrimeScalar((o - self.residue) % self.modulus, self.modulus)

    def __neg__(self):
        return PrimeScalar(-self.residue % self.modulus, self.modulus)

    def __mul__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return PrimeScalar(self.residue * o % self.modulus, self.modulus)

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        if o == 0:
            raise ZeroDivisionError("division by zero in prime field")
        return PrimeScalar(self.residue * pow(o, -1, self.modulus) % self.modulus, self.modulus)

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return PrimeScalar(o, self.modulus) / self

    def __eq__(self, other):
        o = self._coerce(other) if not isinstance(other, PrimeScalar) else other.residue
        if o is None:
            return NotImplemented
        return self.residue == o

    def __hash__(self):
        return hash((self.residue, self.modulus))

    def __bool__(self):
        return self.residue != 0


# ---------------------------------------------------------------------------
# Sparse matrices
# ---------------------------------------------------------------------------


@dataclass
class SparseMatrix:
    """Row-major sparse matrix; absent entries are zero."""

    rows: int
    cols: int
    data: dict[int, dict[int, object]] = field(default_factory=dict)

    def __post_init__(self):
        clean = {}
        for r, row in self.data.items():
            if not 0 <= r < self.rows:
                raise IndexError(f"row {r} out of range")
            kept = {c: v for c, v in row.items() if v}
            for c in kept:
                if not 0 <= c < self.cols:
                    raise IndexError(f"column {c} out of range")
            if kept:
                clean[r] = kept
        self.data = clean

    @classmethod
    def from_rows(cls, rows: Iterable[Mapping[int, object]], cols: int) -> "SparseMatrix":
        rows = list(rows)
        return cls(len(rows), cols, {i: dict(r) for i, r in enumerate(rows)})

    @classmethod
    def from_dense(cls, dense: Iterable[Iterable]) -> "SparseMatrix":
        dense = [list(r) for r in dense]
        cols = len(dense[0]) if dense else 0
        return cls.from_rows(
            ({j: as_scalar(v) for j, v in enumerate(r) if v} for r in dense), cols
        )

    @classmethod
    def identity(cls, n: int) -> "SparseMatrix":
        return cls(n, n, {i: {i: Fraction(1)} for i in range(n)})

    @property
    def entries(self) -> dict[tuple[int, int], object]:
        return {(r, c): v for r, row in self.data.items() for c, v in row.items()}

    def row(self, r: int) -> dict[int, object]:
        return self.data.get(r, {})

    def to_dense(self) -> list[list]:
        out = [[Fraction(0)] * self.cols for _ in range(self.rows)]
        for r, row in self.data.items():
            for c, v in row.items():
                out[r][c] = v
        return out

    def transpose(self) -> "SparseMatrix":
        t: dict[int, dict[int, object]] = {}
        for r, row in self.data.items():
            for c, v in row.items():
                t.setdefault(c, {})[r] = v
        return SparseMatrix(self.cols, self.rows, t)

    def nnz(self) -> int:
        return sum(len(r) for r in self.data.values())

    def __eq__(self, other):
        if not isinstance(other, SparseMatrix):
            return NotImplemented
        return (self.rows, self.cols, self.data) == (other.rows, other.cols, other.data)


def _axpy(target: dict, factor, source: Mapping) -> None:
    """target -= factor * source, dropping cancelled entries."""
    for c, v in source.items():
        nv = target.get(c, 0) - factor * v
        if nv:
            target[c] = nv
        else:
            target.pop(c, None)


def _is_rational(v) -> bool:
    return isinstance(v, (Fraction, int)) and not isinstance(v, bool)


def _to_int_row(row: Mapping[int, object]) -> dict[int, int]:
    """Primitive integer multiple of a rational row (content 1)."""
    den = lcm(*(Fraction(v).denominator for v in row.values()))
    out = {c: Fraction(v).numerator * (den // Fraction(v).denominator) for c, v in row.items() if v}
    g = gcd(*out.values()) if out else 1
    return {c: v // g for c, v in out.items()} if g > 1 else out


def _int_eliminate(row: dict[int, int], prow: dict[int, int], col: int) -> dict[int, int]:
    """Fraction-free ``a*row - b*prow`` clearing ``col``, divided by its content."""
    a, b = prow[col], row[col]
    g = gcd(a, b)
    a, b = a // g, b // g
    out = {c: v * a for c, v in row.items()} if a != 1 else dict(row)
    for c, v in prow.items():
        nv = out.get(c, 0) - b * v
        if nv:
            out[c] = nv
        else:
            out.pop(c, None)
    g = gcd(*out.values()) if out else 1
    return {c: v // g for c, v in out.items()} if g > 1 else out


def _int_echelon(rows: Iterable[Mapping[int, object]]) -> dict[int, dict[int, int]]:
    pivots: dict[int, dict[int, int]] = {}
    for src in rows:
        row = _to_int_row(src)
        while row:
            lead = min(row)
            prow = pivots.get(lead)
            if prow is None:
                if row[lead] < 0:
                    row = {c: -v for c, v in row.items()}
                pivots[lead] = row
                break
            row = _int_eliminate(row, prow, lead)
    return pivots


def _int_back_substitute(pivots: dict[int, dict[int, int]]) -> None:
    for col in sorted(pivots, reverse=True):
        prow = pivots[col]
        for other_col in list(pivots):
            other = pivots[other_col]
            if other_col < col and col in other:
                pivots[other_col] = _int_eliminate(other, prow, col)


def _int_to_fraction(pivots: dict[int, dict[int, int]]) -> dict[int, dict[int, Fraction]]:
    out = {}
    for col, row in pivots.items():
        a = row[col]
        out[col] = {c: Fraction(v, a) for c, v in row.items()}
    return out


def echelon(rows: Iterable[Mapping[int, object]]) -> dict[int, dict[int, object]]:
    """Semi-reduced echelon form keyed by pivot column.

    Each returned row has its minimum column as pivot, with pivot entry 1.
    Only leading entries are cleared while inserting, which keeps fill-in
    low; call :func:`back_substitute` for the fully reduced form.  Rational
    input is eliminated fraction-free over the integers.
    """
    rows = [r for r in rows if r]
    if all(_is_rational(v) for r in rows for v in r.values()):
        return _int_to_fraction(_int_echelon(rows))
    pivots: dict[int, dict[int, object]] = {}
    for src in rows:
        row = {c: v for c, v in src.items() if v}
        while row:
            lead = min(row)
            prow = pivots.get(lead)
            if prow is None:
                inv = 1 / row[lead]
                pivots[lead] = {c: v * inv for c, v in row.items()}
                break
            _axpy(row, row[lead], prow)
    return pivots


def back_substitute(pivots: dict[int, dict[int, object]]) -> dict[int, dict[int, object]]:
    """Clear every pivot column outside its own row (in place)."""
    for col in sorted(pivots, reverse=True):
        prow = pivots[col]
        for other_col, other in pivots.items():
            if other_col < col and col in other:
                _axpy(other, other[col], prow)
    return pivots


def reduced_echelon(rows: Iterable[Mapping[int, object]]) -> dict[int, dict[int, object]]:
    """Fully reduced echelon form keyed by pivot column (pivot entries 1)."""
    rows = [r for r in rows if r]
    if all(_is_rational(v) for r in rows for v in r.values()):
        pivots = _int_echelon(rows)
        _int_back_substitute(pivots)
        return _int_to_fraction(pivots)
    return back_substitute(echelon(rows))


def rref(m: SparseMatrix) -> tuple[int, SparseMatrix]:
    """Reduced row-echelon form of ``m`` over its entry field.

    Returns ``(rank, basis)`` where ``basis`` has ``rank`` rows sorted by
    strictly increasing pivot column, pivot entries 1, and zeros above and
    below every pivot.
    """
    pivots = reduced_echelon(m.data[r] for r in sorted(m.data))
    order = sorted(pivots)
    basis = SparseMatrix(len(order), m.cols, {i: pivots[c] for i, c in enumerate(order)})
    return len(order), basis


def rank(m: SparseMatrix) -> int:
    return len(echelon(m.data.values()))


def pivot_columns(basis: SparseMatrix) -> list[int]:
    return [min(basis.data[r]) for r in range(basis.rows)]


def subspace_equal(a: SparseMatrix, b: SparseMatrix) -> bool:
    """True iff the row spaces of ``a`` and ``b`` coincide."""
    if a.cols != b.cols:
        raise ValueError(f"column counts differ: {a.cols} vs {b.cols}")
    return rref(a)[1] == rref(b)[1]


def nullspace(m: SparseMatrix) -> list[dict[int, object]]:
    """Basis of the right kernel ``{v : m v = 0}`` as sparse column vectors."""
    _, basis = rref(m)
    piv = {min(row): row for row in basis.data.values()}
    out = []
    for free in range(m.cols):
        if free in piv:
            continue
        vec = {free: Fraction(1)}
        for p, row in piv.items():
            v = row.get(free)
            if v:
                vec[p] = -v
        out.append(vec)
    return out


def solve(m: SparseMatrix, rhs: Mapping[int, object]) -> dict[int, object] | None:
    """One solution ``x`` of ``m x = rhs`` (free variables zero), or None."""
    aug_col = m.cols
    rows = []
    for r in range(m.rows):
        row = dict(m.row(r))
        if rhs.get(r):
            row[aug_col] = rhs[r]
        rows.append(row)
    pivots = reduced_echelon(rows)
    if aug_col in pivots:
        return None
    return {c: row[aug_col] for c, row in pivots.items() if aug_col in row}


# ---------------------------------------------------------------------------
# Modular rank
# ---------------------------------------------------------------------------


class PrimeRetryError(RuntimeError):
    pass


def rank_mod_p(m: SparseMatrix, seed: int = 0, max_retries: int = 8) -> int:
    """Rank of a rational matrix reduced modulo a seeded prime > 2^60.

    The result never exceeds the rational rank and equals it unless the
    prime happens to divide one of finitely many minors.
    """
    for attempt in range(max_retries):
        p = prime_from_seed(seed, attempt)
        try:
            rows = [_reduce_row_mod(row, p) for row in m.data.values()]
        except ZeroDivisionError:
            continue
        return _rank_mod(rows, p)
    raise PrimeRetryError(f"every drawn prime divided a denominator (seed {seed})")


def _reduce_row_mod(row: Mapping[int, object], p: int) -> dict[int, int]:
    out = {}
    for c, v in row.items():
        v = as_scalar(v)
        if v.denominator % p == 0:
            raise ZeroDivisionError
        r = v.numerator * pow(v.denominator, -1, p) % p
        if r:
            out[c] = r
    return out


def _rank_mod(rows: list[dict[int, int]], p: int) -> int:
    pivots: dict[int, dict[int, int]] = {}
    for row in rows:
        while row:
            lead = min(row)
            prow = pivots.get(lead)
            if prow is None:
                inv = pow(row[lead], -1, p)
                pivots[lead] = {c: v * inv % p for c, v in row.items()}
                break
            f = row[lead]
            for c, v in prow.items():
                nv = (row.get(c, 0) - f * v) % p
                if nv:
                    row[c] = nv
                else:
                    row.pop(c, None)
    return len(pivots)


def to_prime_field(m: SparseMatrix, p: int) -> SparseMatrix:
    return SparseMatrix(
        m.rows,
        m.cols,
        {r: {c: PrimeScalar.from_rational(v, p) for c, v in row.items()} for r, row in m.data.items()},
    )


def mat_mul(a: list[list], b: list[list]) -> list[list]:
    """Dense product of small exact matrices."""
    n, k, m = len(a), len(b), len(b[0]) if b else 0
    return [[sum((a[i][t] * b[t][j] for t in range(k)), Fraction(0)) for j in range(m)] for i in range(n)]


def mat_inverse(a: list[list]) -> list[list]:
    """Inverse of a dense square matrix; raises ValueError if singular."""
    n = len(a)
    rows = [{**{j: as_scalar(v) for j, v in enumerate(r) if v}, n + i: Fraction(1)} for i, r in enumerate(a)]
    pivots = reduced_echelon(rows)
    if any(i not in pivots for i in range(n)):
        raise ValueError("matrix is singular")
    return [[pivots[i].get(n + j, Fraction(0)) for j in range(n)] for i in range(n)]


def identity_matrix(n: int) -> list[list[Fraction]]:
    return [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]
