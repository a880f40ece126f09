"""Subspaces of Q^r, stored as reduced row echelon bases."""

from fractions import Fraction
from typing import List, Sequence, Tuple

Vector = Tuple[Fraction, ...]


def as_vector(v) -> Vector:
    return tuple(Fraction(x) for x in v)


def rref(vectors: Sequence[Sequence], width: int = None) -> Tuple[Vector, ...]:
    """Reduced row echelon basis of the span of ``vectors``.

    Two spans are equal iff their ``rref`` tuples are equal.
    """
    rows = [list(as_vector(v)) for v in vectors]
    if width is None:
        width = len(rows[0]) if rows else 0
    r = 0
    for c in range(width):
        p = next((i for i in range(r, len(rows)) if rows[i][c] != 0), None)
        if p is None:
            continue
        rows[r], rows[p] = rows[p], rows[r]
        piv = rows[r][c]
        rows[r] = [x / piv for x in rows[r]]
        for i in range(len(rows)):
            if i != r and rows[i][c] != 0:
                f = rows[i][c]
                rows[i] = [x - f * y for x, y in zip(rows[i], rows[r])]
        r += 1
        if r == len(rows):
            break
    return tuple(tuple(row) for row in rows[:r])


def rank(vectors: Sequence[Sequence]) -> int:
    return len(rref(vectors))


def span_sum(*spaces: Sequence[Sequence], width: int) -> Tuple[Vector, ...]:
    vecs = [v for s in spaces for v in s]
    return rref(vecs, width)


def nullspace(rows: Sequence[Sequence], width: int) -> List[Vector]:
    """Basis of ``{x : rows @ x == 0}``."""
    red = rref(rows, width)
    pivots = []
    for row in red:
        pivots.append(next(i for i, x in enumerate(row) if x != 0))
    free = [c for c in range(width) if c not in pivots]
    basis = []
    for f in free:
        x = [Fraction(0)] * width
        x[f] = Fraction(1)
        for row, p in zip(red, pivots):
            x[p] = -row[f]
        basis.append(tuple(x))
    return basis


def intersect(a: Sequence[Sequence], b: Sequence[Sequence], width: int) -> Tuple[Vector, ...]:
    a = rref(a, width)
    b = rref(b, width)
    if not a or not b:
        return ()
    # columns: coefficients alpha over a, beta over b with sum alpha a = sum beta b
    system = [[a[i][k] for i in range(len(a))] + [-b[j][k] for j in range(len(b))] for k in range(width)]
    kernel = nullspace(system, len(a) + len(b))
    vecs = []
    for coeffs in kernel:
        vecs.append(tuple(sum(coeffs[i] * a[i][k] for i in range(len(a))) for k in range(width)))
    return rref(vecs, width)


def contains(space: Sequence[Sequence], v: Sequence) -> bool:
    if not space:
        return all(x == 0 for x in v)
    return rank(list(space) + [as_vector(v)]) == rank(space)


def complement(space: Sequence[Sequence], sub: Sequence[Sequence], width: int) -> List[Vector]:
    """Vectors from the echelon basis of ``space`` that extend ``sub`` to a basis of it.

    ``sub`` must lie inside ``space``.
    """
    chosen = list(rref(sub, width))
    current = len(chosen)
    out = []
    for v in rref(space, width):
        if rank(chosen + [v]) > current:
            chosen.append(v)
            current += 1
            out.append(v)
    return out


def solve(matrix: Sequence[Sequence], rhs: Sequence) -> Vector:
    """Solve a square nonsingular system over Q."""
    n = len(matrix)
    aug = [list(as_vector(row)) + [Fraction(rhs[i])] for i, row in enumerate(matrix)]
    for c in range(n):
        p = next((r for r in range(c, n) if aug[r][c] != 0), None)
        if p is None:
            raise ValueError("singular system")
        aug[c], aug[p] = aug[p], aug[c]
        piv = aug[c][c]
        aug[c] = [x / piv for x in aug[c]]
        for r in range(n):
            if r != c and aug[r][c] != 0:
                f = aug[r][c]
                aug[r] = [x - f * y for x, y in zip(aug[r], aug[c])]
    return tuple(aug[i][n] for i in range(n))


def inverse(matrix: Sequence[Sequence]) -> List[List[Fraction]]:
    n = len(matrix)
    cols = [solve(matrix, [int(i == j) for i in range(n)]) for j in range(n)]
    return [[cols[j][i] for j in range(n)] for i in range(n)]
