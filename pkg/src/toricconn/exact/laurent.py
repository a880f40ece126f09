"""Sparse Laurent polynomials and matrices over them, with rational coefficients.

A :class:`LaurentPoly` in ``n`` variables maps integer exponent vectors (any
sign) to nonzero :class:`fractions.Fraction` coefficients. Values are
immutable; equality is equality of term collections, so "this identity
holds" is a structural comparison.
"""

from fractions import Fraction
from itertools import permutations
from typing import Dict, Iterable, Mapping, Sequence, Tuple

from ..errors import DimensionMismatch, NonUnitImage, NotInvertible

Exponent = Tuple[int, ...]


def _perm_sign(p) -> int:
    sign = 1
    seen = [False] * len(p)
    for i in range(len(p)):
        if seen[i]:
            continue
        j, length = i, 0
        while not seen[j]:
            seen[j] = True
            j = p[j]
            length += 1
        if length % 2 == 0:
            sign = -sign
    return sign


class LaurentPoly:
    __slots__ = ("nvars", "_terms", "_hash")

    def __init__(self, nvars: int, terms: Mapping[Sequence[int], object] = None):
        self.nvars = nvars
        clean: Dict[Exponent, Fraction] = {}
        for exp, coeff in (terms or {}).items():
            exp = tuple(int(e) for e in exp)
            if len(exp) != nvars:
                raise DimensionMismatch(f"exponent {exp} has length {len(exp)}, expected {nvars}")
            c = Fraction(coeff)
            if c:
                clean[exp] = clean.get(exp, Fraction(0)) + c
                if not clean[exp]:
                    del clean[exp]
        self._terms = clean
        self._hash = None

    @classmethod
    def _raw(cls, nvars: int, terms: Dict[Exponent, Fraction]) -> "LaurentPoly":
        # trusted constructor: terms already clean
        obj = cls.__new__(cls)
        obj.nvars = nvars
        obj._terms = terms
        obj._hash = None
        return obj

    @classmethod
    def zero(cls, nvars: int) -> "LaurentPoly":
        return cls._raw(nvars, {})

    @classmethod
    def constant(cls, nvars: int, c=1) -> "LaurentPoly":
        return cls(nvars, {(0,) * nvars: c})

    @classmethod
    def monomial(cls, exponent: Sequence[int], coeff=1) -> "LaurentPoly":
        return cls(len(exponent), {tuple(exponent): coeff})

    @classmethod
    def variable(cls, nvars: int, i: int) -> "LaurentPoly":
        exp = [0] * nvars
        exp[i] = 1
        return cls(nvars, {tuple(exp): 1})

    # -- inspection -------------------------------------------------------

    @property
    def terms(self) -> Tuple[Tuple[Exponent, Fraction], ...]:
        """Terms sorted by exponent, the canonical form."""
        return tuple(sorted(self._terms.items()))

    def __iter__(self):
        return iter(self.terms)

    def __len__(self) -> int:
        return len(self._terms)

    def is_zero(self) -> bool:
        return not self._terms

    def is_constant(self) -> bool:
        return not self._terms or set(self._terms) == {(0,) * self.nvars}

    def constant_term(self) -> Fraction:
        return self._terms.get((0,) * self.nvars, Fraction(0))

    def is_unit(self) -> bool:
        """A Laurent polynomial is a unit iff it is a single nonzero term."""
        return len(self._terms) == 1

    def leading(self) -> Tuple[Exponent, Fraction]:
        if not self.is_unit():
            raise NonUnitImage(f"{self} is not a monomial")
        return next(iter(self._terms.items()))

    def __eq__(self, other):
        if not isinstance(other, LaurentPoly):
            return NotImplemented
        return self.nvars == other.nvars and self._terms == other._terms

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.nvars, frozenset(self._terms.items())))
        return self._hash

    # -- ring operations ---------------------------------------------------

    def _coerce(self, other) -> "LaurentPoly":
        if isinstance(other, LaurentPoly):
            if other.nvars != self.nvars:
                raise DimensionMismatch(f"{self.nvars} vs {other.nvars} variables")
            return other
        if isinstance(other, (int, Fraction)):
            return LaurentPoly.constant(self.nvars, other)
        raise TypeError(f"cannot combine LaurentPoly with {type(other).__name__}")

    def __add__(self, other):
        other = self._coerce(other)
        out = dict(self._terms)
        for e, c in other._terms.items():
            s = out.get(e, 0) + c
            if s:
                out[e] = s
            else:
                out.pop(e, None)
        return LaurentPoly._raw(self.nvars, out)

    __radd__ = __add__

    def __neg__(self):
        return LaurentPoly._raw(self.nvars, {e: -c for e, c in self._terms.items()})

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        other = self._coerce(other)
        out: Dict[Exponent, Fraction] = {}
        for e1, c1 in self._terms.items():
            for e2, c2 in other._terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                s = out.get(e, 0) + c1 * c2
                if s:
                    out[e] = s
                else:
                    out.pop(e, None)
        return LaurentPoly._raw(self.nvars, out)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if k < 0:
            return self.inverse() ** (-k)
        result = LaurentPoly.constant(self.nvars, 1)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def inverse(self) -> "LaurentPoly":
        if not self.is_unit():
            raise NotInvertible(f"{self} is not a unit in the Laurent ring")
        e, c = self.leading()
        return LaurentPoly._raw(self.nvars, {tuple(-x for x in e): 1 / c})

    # -- calculus and substitution -----------------------------------------

    def euler(self, i: int) -> "LaurentPoly":
        """Apply ``x_i d/dx_i``: the logarithmic derivative operator."""
        return LaurentPoly._raw(
            self.nvars, {e: c * e[i] for e, c in self._terms.items() if e[i]}
        )

    def diff(self, i: int) -> "LaurentPoly":
        out = {}
        for e, c in self._terms.items():
            if e[i]:
                ne = list(e)
                ne[i] -= 1
                out[tuple(ne)] = c * e[i]
        return LaurentPoly._raw(self.nvars, out)

    def at_zero(self, i: int) -> "LaurentPoly":
        """Keep the terms not involving ``x_i``, i.e. restrict to ``x_i = 0``.

        Only meaningful when no term has a negative power of ``x_i``.
        """
        return LaurentPoly._raw(self.nvars, {e: c for e, c in self._terms.items() if e[i] == 0})

    def filter(self, keep) -> "LaurentPoly":
        return LaurentPoly._raw(self.nvars, {e: c for e, c in self._terms.items() if keep(e)})

    def shift(self, exponent: Sequence[int]) -> "LaurentPoly":
        """Multiply by the monomial ``x^exponent``."""
        return LaurentPoly._raw(
            self.nvars,
            {tuple(a + b for a, b in zip(e, exponent)): c for e, c in self._terms.items()},
        )

    def substitute(self, images: Sequence["LaurentPoly"]) -> "LaurentPoly":
        """Ring homomorphism sending ``x_i`` to ``images[i]``.

        Every image must be a unit so that negative exponents make sense.
        """
        if len(images) != self.nvars:
            raise DimensionMismatch(f"{len(images)} images for {self.nvars} variables")
        if not images:
            return LaurentPoly(0, dict(self._terms))
        target = images[0].nvars
        parts = []
        for img in images:
            if not isinstance(img, LaurentPoly) or not img.is_unit():
                raise NonUnitImage(f"substitution image {img} is not a single-term unit")
            if img.nvars != target:
                raise DimensionMismatch("substitution images live in different rings")
            parts.append(img.leading())
        out: Dict[Exponent, Fraction] = {}
        for e, c in self._terms.items():
            exp = [0] * target
            coeff = c
            for k, (ie, ic) in zip(e, parts):
                if k:
                    coeff *= ic ** k
                    for j in range(target):
                        exp[j] += k * ie[j]
            key = tuple(exp)
            s = out.get(key, 0) + coeff
            if s:
                out[key] = s
            else:
                out.pop(key, None)
        return LaurentPoly._raw(target, out)

    def embed(self, nvars: int, offset: int = 0) -> "LaurentPoly":
        """View this polynomial in a ring with more variables."""
        if offset + self.nvars > nvars:
            raise DimensionMismatch("target ring too small")
        out = {}
        for e, c in self._terms.items():
            ne = [0] * nvars
            ne[offset:offset + self.nvars] = e
            out[tuple(ne)] = c
        return LaurentPoly._raw(nvars, out)

    # -- display -----------------------------------------------------------

    def to_string(self, names: Sequence[str] = None) -> str:
        if not self._terms:
            return "0"
        names = names or [f"x{i + 1}" for i in range(self.nvars)]
        pieces = []
        for e, c in self.terms:
            mono = "*".join(
                n if k == 1 else f"{n}^{k}" for n, k in zip(names, e) if k
            )
            if not mono:
                pieces.append(str(c))
            elif c == 1:
                pieces.append(mono)
            elif c == -1:
                pieces.append("-" + mono)
            else:
                pieces.append(f"{c}*{mono}")
        return " + ".join(pieces).replace("+ -", "- ")

    def __repr__(self):
        return f"LaurentPoly({self.to_string()})"

    __str__ = to_string


class LaurentMatrix:
    """Dense matrix with :class:`LaurentPoly` entries, all in one ring."""

    __slots__ = ("nvars", "rows", "cols", "_entries")

    def __init__(self, nvars: int, entries: Iterable[Iterable[LaurentPoly]]):
        rows = tuple(tuple(row) for row in entries)
        if not rows or not rows[0]:
            raise DimensionMismatch("matrices must be at least 1x1")
        width = len(rows[0])
        for row in rows:
            if len(row) != width:
                raise DimensionMismatch("ragged matrix")
            for p in row:
                if not isinstance(p, LaurentPoly) or p.nvars != nvars:
                    raise DimensionMismatch("entry is not a LaurentPoly in the matrix ring")
        self.nvars = nvars
        self.rows = len(rows)
        self.cols = width
        self._entries = rows

    @classmethod
    def zeros(cls, nvars: int, rows: int, cols: int = None) -> "LaurentMatrix":
        cols = rows if cols is None else cols
        z = LaurentPoly.zero(nvars)
        return cls(nvars, [[z] * cols for _ in range(rows)])

    @classmethod
    def identity(cls, nvars: int, size: int) -> "LaurentMatrix":
        return cls.diagonal(nvars, [LaurentPoly.constant(nvars, 1)] * size)

    @classmethod
    def diagonal(cls, nvars: int, entries: Sequence[LaurentPoly]) -> "LaurentMatrix":
        z = LaurentPoly.zero(nvars)
        return cls(nvars, [[entries[i] if i == j else z for j in range(len(entries))] for i in range(len(entries))])

    @classmethod
    def constant(cls, nvars: int, values: Sequence[Sequence]) -> "LaurentMatrix":
        return cls(nvars, [[LaurentPoly.constant(nvars, v) for v in row] for row in values])

    @property
    def shape(self) -> Tuple[int, int]:
        return (self.rows, self.cols)

    def __getitem__(self, idx) -> LaurentPoly:
        i, j = idx
        return self._entries[i][j]

    def entries(self) -> Tuple[Tuple[LaurentPoly, ...], ...]:
        return self._entries

    def __eq__(self, other):
        if not isinstance(other, LaurentMatrix):
            return NotImplemented
        return self.nvars == other.nvars and self._entries == other._entries

    def __hash__(self):
        return hash((self.nvars, self._entries))

    def map(self, fn) -> "LaurentMatrix":
        out = [[fn(p) for p in row] for row in self._entries]
        nvars = out[0][0].nvars
        return LaurentMatrix(nvars, out)

    def _check_same(self, other):
        if not isinstance(other, LaurentMatrix):
            raise TypeError("expected a LaurentMatrix")
        if other.shape != self.shape or other.nvars != self.nvars:
            raise DimensionMismatch(f"shapes {self.shape}/{self.nvars} vs {other.shape}/{other.nvars}")

    def __add__(self, other):
        self._check_same(other)
        return LaurentMatrix(
            self.nvars,
            [[a + b for a, b in zip(r1, r2)] for r1, r2 in zip(self._entries, other._entries)],
        )

    def __sub__(self, other):
        self._check_same(other)
        return LaurentMatrix(
            self.nvars,
            [[a - b for a, b in zip(r1, r2)] for r1, r2 in zip(self._entries, other._entries)],
        )

    def __neg__(self):
        return self.map(lambda p: -p)

    def scale(self, c) -> "LaurentMatrix":
        return self.map(lambda p: p * c)

    def __matmul__(self, other):
        if not isinstance(other, LaurentMatrix):
            return NotImplemented
        if self.cols != other.rows or self.nvars != other.nvars:
            raise DimensionMismatch(f"cannot multiply {self.shape} by {other.shape}")
        zero = LaurentPoly.zero(self.nvars)
        out = []
        for i in range(self.rows):
            row = []
            for j in range(other.cols):
                acc = zero
                for k in range(self.cols):
                    a = self._entries[i][k]
                    if a.is_zero():
                        continue
                    b = other._entries[k][j]
                    if not b.is_zero():
                        acc = acc + a * b
                row.append(acc)
            out.append(row)
        return LaurentMatrix(self.nvars, out)

    def transpose(self) -> "LaurentMatrix":
        return LaurentMatrix(self.nvars, zip(*self._entries))

    def is_zero(self) -> bool:
        return all(p.is_zero() for row in self._entries for p in row)

    def is_diagonal(self) -> bool:
        return all(
            p.is_zero() for i, row in enumerate(self._entries) for j, p in enumerate(row) if i != j
        )

    def is_constant(self) -> bool:
        return all(p.is_constant() for row in self._entries for p in row)

    def constant_values(self):
        return [[p.constant_term() for p in row] for row in self._entries]

    def minor(self, i: int, j: int) -> "LaurentMatrix":
        return LaurentMatrix(
            self.nvars,
            [[p for c, p in enumerate(row) if c != j] for r, row in enumerate(self._entries) if r != i],
        )

    def det(self) -> LaurentPoly:
        # Leibniz expansion; matrices here are at most rank-of-bundle sized.
        if self.rows != self.cols:
            raise DimensionMismatch("determinant of a non-square matrix")
        n = self.rows
        total = LaurentPoly.zero(self.nvars)
        for p in permutations(range(n)):
            term = LaurentPoly.constant(self.nvars, _perm_sign(p))
            for i in range(n):
                term = term * self._entries[i][p[i]]
                if term.is_zero():
                    break
            total = total + term
        return total

    def adjugate(self) -> "LaurentMatrix":
        n = self.rows
        if n == 1:
            return LaurentMatrix.identity(self.nvars, 1)
        return LaurentMatrix(
            self.nvars,
            [[self.minor(j, i).det() * (-1) ** (i + j) for j in range(n)] for i in range(n)],
        )

    def inverse(self) -> "LaurentMatrix":
        """Exact inverse; exists iff the determinant is a monomial unit."""
        d = self.det()
        if not d.is_unit():
            raise NotInvertible(f"determinant {d} is not a unit")
        dinv = d.inverse()
        return self.adjugate().map(lambda p: p * dinv)

    def substitute(self, images: Sequence[LaurentPoly]) -> "LaurentMatrix":
        return self.map(lambda p: p.substitute(images))

    def embed(self, nvars: int, offset: int = 0) -> "LaurentMatrix":
        return self.map(lambda p: p.embed(nvars, offset))

    def euler(self, i: int) -> "LaurentMatrix":
        return self.map(lambda p: p.euler(i))

    def first_difference(self, other: "LaurentMatrix"):
        """``(i, j, mine, theirs)`` for the first differing entry, else ``None``."""
        for i in range(self.rows):
            for j in range(self.cols):
                if self._entries[i][j] != other._entries[i][j]:
                    return i, j, self._entries[i][j], other._entries[i][j]
        return None

    def to_strings(self, names=None):
        return [[p.to_string(names) for p in row] for row in self._entries]

    def __repr__(self):
        return f"LaurentMatrix({self.to_strings()})"


def laurent_substitute(p: LaurentPoly, images: Sequence[LaurentPoly]) -> LaurentPoly:
    return p.substitute(images)

