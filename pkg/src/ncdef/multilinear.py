"""Sparse tensors on an n-dimensional generator space.

A :class:`Tensor` is a homogeneous element of ``V^{(x)d}``, i.e. a
noncommutative polynomial of degree ``d`` in ``x_0, ..., x_{n-1}``.  Words
are tuples of generator indices; within a fixed degree they are ordered
lexicographically, which is also the order of their base-``n`` index.
"""

from __future__ import annotations

import itertools
import re
from fractions import Fraction
from typing import Iterable, Mapping

from .exactlin import SparseMatrix, as_scalar, rref, scalar_to_str, subspace_equal

Word = tuple[int, ...]


def _coerce(c):
    if isinstance(c, int) and not isinstance(c, bool):
        return Fraction(c)
    return c


def word_index(word: Word, n: int) -> int:
    idx = 0
    for letter in word:
        idx = idx * n + letter
    return idx


def index_word(idx: int, n: int, degree: int) -> Word:
    out = []
    for _ in range(degree):
        idx, r = divmod(idx, n)
        out.append(r)
    return tuple(reversed(out))


def all_words(n: int, degree: int) -> Iterable[Word]:
    return itertools.product(range(n), repeat=degree)


class Tensor:
    """Homogeneous sparse tensor of degree ``degree`` over ``n`` generators.

    ``t1 * t2`` is the tensor (free-algebra) product; multiplying by a
    scalar scales coefficients.  Coefficients may be Fractions or any ring
    element supporting arithmetic (e.g. :class:`~ncdef.exactlin.DualScalar`).
    """

    __slots__ = ("n", "degree", "terms")

    def __init__(self, n: int, degree: int, terms: Mapping[Word, object] | None = None):
        self.n = n
        self.degree = degree
        clean: dict[Word, object] = {}
        for w, c in (terms or {}).items():
            w = tuple(w)
            if len(w) != degree:
                raise ValueError(f"word {w} has length {len(w)}, expected {degree}")
            if any(not 0 <= a < n for a in w):
                raise ValueError(f"word {w} has a letter outside 0..{n - 1}")
            c = _coerce(c)
            if c:
                clean[w] = c
        self.terms = clean

    # -- constructors -----------------------------------------------------

    @classmethod
    def zero(cls, n: int, degree: int) -> "Tensor":
        return cls(n, degree)

    @classmethod
    def word(cls, n: int, word: Iterable[int], coeff=1) -> "Tensor":
        word = tuple(word)
        return cls(n, len(word), {word: coeff})

    @classmethod
    def parse(cls, n: int, text: str) -> "Tensor":
        """Parse a monomial such as ``"x0^2 x1 x3"`` (spaces optional)."""
        word: list[int] = []
        for var, exp in re.findall(r"x_?\{?(\d+)\}?(?:\^\{?(\d+)\}?)?", text):
            word.extend([int(var)] * int(exp or 1))
        if not word and text.strip() not in ("", "1"):
            raise ValueError(f"cannot parse monomial {text!r}")
        return cls.word(n, word)

    # -- arithmetic -------------------------------------------------------

    def _check(self, other: "Tensor"):
        if (self.n, self.degree) != (other.n, other.degree):
            raise ValueError("tensors of different shape")

    def __add__(self, other):
        if isinstance(other, int) and other == 0:
            return self
        self._check(other)
        terms = dict(self.terms)
        for w, c in other.terms.items():
            terms[w] = terms.get(w, 0) + c
        return Tensor(self.n, self.degree, terms)

    __radd__ = __add__

    def __neg__(self):
        return Tensor(self.n, self.degree, {w: -c for w, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, Tensor):
            if other.n != self.n:
                raise ValueError("tensors over different generator spaces")
            terms: dict[Word, object] = {}
            for w1, c1 in self.terms.items():
                for w2, c2 in other.terms.items():
                    w = w1 + w2
                    terms[w] = terms.get(w, 0) + c1 * c2
            return Tensor(self.n, self.degree + other.degree, terms)
        other = _coerce(other)
        return Tensor(self.n, self.degree, {w: c * other for w, c in self.terms.items()})

    def __rmul__(self, other):
        other = _coerce(other)
        return Tensor(self.n, self.degree, {w: other * c for w, c in self.terms.items()})

    def __eq__(self, other):
        if not isinstance(other, Tensor):
            return NotImplemented
        return (self.n, self.degree, self.terms) == (other.n, other.degree, other.terms)

    def __hash__(self):
        return hash((self.n, self.degree, frozenset(self.terms.items())))

    def __bool__(self):
        return bool(self.terms)

    def __getitem__(self, word) -> object:
        return self.terms.get(tuple(word), Fraction(0))

    def map_coeffs(self, f) -> "Tensor":
        return Tensor(self.n, self.degree, {w: f(c) for w, c in self.terms.items()})

    def apply_linear(self, mats: list[list[list]]) -> "Tensor":
        """Apply ``mats[k]`` to tensor factor ``k``; ``x_j -> sum_i m[i][j] x_i``."""
        if len(mats) != self.degree:
            raise ValueError("need one matrix per tensor factor")
        out: dict[Word, object] = {}
        for w, c in self.terms.items():
            images = [[(i, m[i][a]) for i in range(self.n) if m[i][a]] for m, a in zip(mats, w)]
            for combo in itertools.product(*images):
                coef = c
                for _, v in combo:
                    coef = coef * v
                key = tuple(i for i, _ in combo)
                out[key] = out.get(key, 0) + coef
        return Tensor(self.n, self.degree, out)

    def __repr__(self):
        if not self.terms:
            return "0"
        parts = []
        for w in sorted(self.terms):
            mono = "".join(f"x{a}" for a in w) or "1"
            parts.append(f"({self.terms[w]})*{mono}")
        return " + ".join(parts)

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "degree": self.degree,
            "terms": [
                {"word": list(w), "coeff": scalar_to_str(self.terms[w])} for w in sorted(self.terms)
            ],
        }

    @classmethod
    def from_json(cls, obj: Mapping) -> "Tensor":
        n, degree = int(obj["n"]), int(obj["degree"])
        terms: dict[Word, Fraction] = {}
        for t in obj["terms"]:
            w = tuple(int(a) for a in t["word"])
            terms[w] = terms.get(w, Fraction(0)) + as_scalar(t["coeff"])
        return cls(n, degree, terms)


def tensor_to_str(t: Tensor) -> str:
    """Human-readable form, e.g. ``x0x1 - x1x0 - 5 x0x0``."""
    if not t.terms:
        return "0"
    parts = []
    for w in sorted(t.terms):
        c = t.terms[w]
        mono = "".join(f"x{a}" for a in w) or "1"
        neg = c < 0
        a = -c if neg else c
        coef = "" if a == 1 else f"{a} "
        parts.append(("- " if neg else "+ ") + coef + mono)
    s = " ".join(parts)
    return s[2:] if s.startswith("+ ") else "-" + s[2:]


# ---------------------------------------------------------------------------
# Cyclic operators and symmetrizers
# ---------------------------------------------------------------------------


def cyc_shift(t: Tensor) -> Tensor:
    """Move the first tensor factor to the end: ``w1 w2 ... wd -> w2 ... wd w1``."""
    if t.degree < 1:
        raise ValueError("cyc_shift needs degree >= 1")
    return Tensor(t.n, t.degree, {w[1:] + w[:1]: c for w, c in t.terms.items()})


def cyclic_sign(degree: int) -> int:
    """Sign picked up by one cyclic shift of a degree-``d`` superpotential."""
    return -1 if degree % 2 == 0 else 1


def supercyclic_sum(t: Tensor) -> Tensor:
    """``sum_k s^k cyc^k(t)`` with ``s = (-1)^(d-1)``.

    For d = 4 this alternates signs (``x0x1x2^2 - x1x2^2x0 + ...``); for
    d = 3 it is the plain cyclic sum.
    """
    s = cyclic_sign(t.degree)
    out = Tensor.zero(t.n, t.degree)
    cur = t
    for k in range(t.degree):
        out = out + (cur if s**k == 1 else -cur)
        cur = cyc_shift(cur)
    return out


def _permutation_sign(perm: tuple[int, ...]) -> int:
    sign = 1
    seen = [False] * len(perm)
    for i in range(len(perm)):
        if seen[i]:
            continue
        j, length = i, 0
        while not seen[j]:
            seen[j] = True
            j = perm[j]
            length += 1
        if length % 2 == 0:
            sign = -sign
    return sign


def bracket_sym(n: int, word: Iterable[int]) -> Tensor:
    """``[w]^+``: sum of the letters of ``w`` over all position permutations."""
    word = tuple(word)
    terms: dict[Word, Fraction] = {}
    for perm in itertools.permutations(range(len(word))):
        w = tuple(word[p] for p in perm)
        terms[w] = terms.get(w, Fraction(0)) + 1
    return Tensor(n, len(word), terms)


def bracket_antisym(n: int, word: Iterable[int]) -> Tensor:
    """``[w]^-``: signed sum over permutations; zero if a letter repeats."""
    word = tuple(word)
    terms: dict[Word, Fraction] = {}
    for perm in itertools.permutations(range(len(word))):
        w = tuple(word[p] for p in perm)
        terms[w] = terms.get(w, Fraction(0)) + _permutation_sign(perm)
    return Tensor(n, len(word), terms)


# ---------------------------------------------------------------------------
# Subspaces, flattenings and contractions
# ---------------------------------------------------------------------------


class TensorSubspace:
    """Subspace of ``V^{(x)d}`` held as a canonical reduced echelon basis.

    Columns are words in lexicographic order, so two subspaces are equal
    iff their bases are equal.
    """

    __slots__ = ("n", "degree", "basis", "_matrix")

    def __init__(self, n: int, degree: int, spanning: Iterable[Tensor] = ()):
        self.n = n
        self.degree = degree
        rows = []
        for t in spanning:
            if (t.n, t.degree) != (n, degree):
                raise ValueError("spanning tensor has the wrong shape")
            rows.append({word_index(w, n): c for w, c in t.terms.items()})
        _, basis = rref(SparseMatrix.from_rows(rows, n**degree))
        self._matrix = basis
        self.basis = [
            Tensor(n, degree, {index_word(c, n, degree): v for c, v in basis.data[r].items()})
            for r in range(basis.rows)
        ]

    @property
    def dim(self) -> int:
        return len(self.basis)

    def matrix(self) -> SparseMatrix:
        return self._matrix

    def contains(self, t: Tensor) -> bool:
        return TensorSubspace(self.n, self.degree, self.basis + [t]).dim == self.dim

    def __eq__(self, other):
        if not isinstance(other, TensorSubspace):
            return NotImplemented
        if (self.n, self.degree) != (other.n, other.degree):
            return False
        return subspace_equal(self._matrix, other._matrix)

    def __hash__(self):
        return hash((self.n, self.degree, tuple(self.basis)))

    def __repr__(self):
        return f"TensorSubspace(n={self.n}, degree={self.degree}, dim={self.dim})"


def flatten(t: Tensor, k: int) -> SparseMatrix:
    """Matrix with rows indexed by length-``k`` words and columns by the rest."""
    if not 0 <= k <= t.degree:
        raise ValueError(f"k must lie in 0..{t.degree}")
    rest = t.degree - k
    data: dict[int, dict[int, object]] = {}
    for w, c in t.terms.items():
        data.setdefault(word_index(w[:k], t.n), {})[word_index(w[k:], t.n)] = c
    return SparseMatrix(t.n**k, t.n**rest, data)


def contract_front(t: Tensor, k: int) -> TensorSubspace:
    """The derivative subspace: contractions of the first ``k`` factors of ``t``."""
    m = flatten(t, k)
    rest = t.degree - k
    rows = [
        Tensor(t.n, rest, {index_word(c, t.n, rest): v for c, v in row.items()})
        for row in m.data.values()
    ]
    return TensorSubspace(t.n, rest, rows)


def partial(t: Tensor, word: Iterable[int]) -> Tensor:
    """Contract the leading factors of ``t`` against the dual word ``word``."""
    word = tuple(word)
    k = len(word)
    return Tensor(t.n, t.degree - k, {w[k:]: c for w, c in t.terms.items() if w[:k] == word})
