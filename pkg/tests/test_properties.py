"""Randomized invariants of the exact kernels."""

from fractions import Fraction

from hypothesis import given, settings
from hypothesis import strategies as st

from toricconn.exact.forms import LogOneForm, exterior_derivative, total_derivative, wedge
from toricconn.exact.lattice import int_det, matmul, smith_normal_form, solve_integer
from toricconn.exact.laurent import LaurentMatrix, LaurentPoly

N = 2
coeffs = st.fractions(min_value=-5, max_value=5, max_denominator=4)


@st.composite
def polys(draw, nvars=N, max_terms=4):
    terms = draw(st.dictionaries(st.tuples(*[st.integers(-3, 3)] * nvars), coeffs, max_size=max_terms))
    return LaurentPoly(nvars, terms)


@st.composite
def units(draw, nvars=N):
    c = draw(coeffs.filter(lambda q: q != 0))
    return LaurentPoly.monomial(draw(st.tuples(*[st.integers(-2, 2)] * nvars)), c)


@st.composite
def int_matrices(draw):
    rows = draw(st.integers(1, 4))
    cols = draw(st.integers(1, 4))
    return [draw(st.lists(st.integers(-9, 9), min_size=cols, max_size=cols)) for _ in range(rows)]


@st.composite
def one_forms(draw, size=2):
    def mat():
        return LaurentMatrix(N, [[draw(polys(max_terms=2)) for _ in range(size)] for _ in range(size)])

    return LogOneForm([mat() for _ in range(N)], [mat() for _ in range(N)])


@given(polys(), polys(), polys())
def test_ring_associativity(a, b, c):
    assert (a * b) * c == a * (b * c)
    assert (a + b) + c == a + (b + c)


@given(polys(), polys(), polys())
def test_ring_distributivity(a, b, c):
    assert a * (b + c) == a * b + a * c


@given(polys(), polys())
def test_ring_commutativity_and_identities(a, b):
    assert a * b == b * a
    assert a + LaurentPoly.zero(N) == a
    assert a * LaurentPoly.constant(N, 1) == a
    assert (a - a).is_zero()


@given(units())
def test_unit_inverse(u):
    assert u * u.inverse() == LaurentPoly.constant(N, 1)


@given(polys(), polys(), units(), units())
def test_substitution_is_ring_homomorphism(a, b, u, v):
    images = [u, v]
    assert (a * b).substitute(images) == a.substitute(images) * b.substitute(images)
    assert (a + b).substitute(images) == a.substitute(images) + b.substitute(images)


@given(polys(), polys())
def test_euler_is_derivation(a, b):
    for i in range(N):
        assert (a * b).euler(i) == a.euler(i) * b + a * b.euler(i)


@settings(max_examples=60)
@given(int_matrices())
def test_snf_unimodular_and_diagonal(m):
    u, s, v = smith_normal_form(m)
    assert int_det(u) in (1, -1)
    assert int_det(v) in (1, -1)
    assert matmul(matmul(u, m), v) == s
    k = min(len(s), len(s[0]))
    for i, row in enumerate(s):
        for j, x in enumerate(row):
            if i != j:
                assert x == 0
    diag = [s[i][i] for i in range(k)]
    assert all(d >= 0 for d in diag)
    for i in range(k - 1):
        if diag[i] == 0:
            assert diag[i + 1] == 0
        else:
            assert diag[i + 1] % diag[i] == 0


@settings(max_examples=60)
@given(int_matrices(), st.data())
def test_solve_integer_recovers_images(m, data):
    x = data.draw(st.lists(st.integers(-5, 5), min_size=len(m[0]), max_size=len(m[0])))
    b = [sum(a * y for a, y in zip(row, x)) for row in m]
    sol = solve_integer(m, b)
    assert sol is not None
    assert [sum(a * y for a, y in zip(row, sol)) for row in m] == b


@given(polys(max_terms=6))
def test_d_of_d_is_zero(p):
    f = LaurentMatrix(N, [[p]])
    assert exterior_derivative(total_derivative(f)).is_zero()


@settings(max_examples=50)
@given(one_forms())
def test_normalization_idempotent(a):
    assert a.normalize() == a
    assert a.normalize().normalize() == a.normalize()
    again = LogOneForm(a.log_part, a.hol_part)
    assert again.log_part == a.log_part and again.hol_part == a.hol_part


@settings(max_examples=50)
@given(one_forms())
def test_log_part_has_no_positive_power(a):
    for i, m in enumerate(a.log_part):
        for row in m.entries():
            for p in row:
                assert all(e[i] <= 0 for e, _ in p.terms)


@settings(max_examples=40)
@given(st.lists(st.lists(st.integers(-3, 3), min_size=2, max_size=2), min_size=2, max_size=2),
       st.lists(st.lists(st.integers(-3, 3), min_size=2, max_size=2), min_size=2, max_size=2))
def test_wedge_of_constants_is_commutator(a, b):
    A = LaurentMatrix.constant(N, a)
    B = LaurentMatrix.constant(N, b)
    w = wedge(LogOneForm([A, B]), LogOneForm([A, B]))
    expected = A @ B - B @ A
    if expected.is_zero():
        assert w.is_zero()
    else:
        assert w.totals()[(0, 1)] == expected


@given(polys(), st.integers(0, N - 1))
def test_residue_reads_x_free_part(p, i):
    a = LogOneForm.from_coefficients([LaurentMatrix(N, [[p if k == i else LaurentPoly.zero(N)]]) for k in range(N)])
    expected = p.filter(lambda e: e[i] <= 0).at_zero(i)
    assert a.residue(i) == LaurentMatrix(N, [[expected]])


def test_fraction_coefficients_stay_exact():
    p = LaurentPoly.constant(1, Fraction(1, 3)) * 3
    assert p == LaurentPoly.constant(1, 1)
