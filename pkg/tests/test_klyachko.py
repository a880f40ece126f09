from fractions import Fraction

import pytest

from toricconn import library
from toricconn.errors import CocycleFailure, IncompatibleFiltrations, NoCoboundary, NotSplit, ParseError
from toricconn.exact.laurent import LaurentMatrix, LaurentPoly
from toricconn.fan import build_atlas
from toricconn.klyachko import (
    KlyachkoData,
    build_cocycle,
    bundle_from_json,
    check_cocycle,
    corrupt_cocycle,
    determinant_divisor,
    direct_sum,
    from_cartier,
    line_bundle,
    pullback_by_torus,
    solve_all,
    solve_coboundary_split,
    tangent_bundle,
    trivial_bundle,
)

from oracles import nonexact_pullback

P1 = library.FANS["p1"]
P2 = library.FANS["p2"]
P1XP1 = library.FANS["p1xp1"]


def chain(fan, data):
    atlas = build_atlas(fan)
    decomps = solve_all(data, atlas)
    return atlas, decomps, build_cocycle(decomps, atlas)


@pytest.mark.parametrize("k", range(-2, 3))
def test_line_bundle_weights_p1(k):
    _, decomps, _ = chain(P1, line_bundle(P1, [0, k]))
    assert [d.weights for d in decomps] == [[(0,)], [(-k,)]]


@pytest.mark.parametrize("k", range(-2, 3))
def test_line_bundle_transition_p1(k):
    atlas, _, c = chain(P1, line_bundle(P1, [0, k]))
    x = LaurentPoly.variable(1, 0)
    assert c[(0, 1)] == LaurentMatrix(1, [[x ** k]])
    check_cocycle(c, atlas)


def test_trivial_bundle_single_weight_identity_cocycle():
    atlas, decomps, c = chain(P2, trivial_bundle(P2, 3))
    for d in decomps:
        assert set(d.weights) == {(0, 0)}
    for m in c.matrices.values():
        assert m == LaurentMatrix.identity(2, 3)


def test_tp2_weights_are_chart_characters():
    atlas, decomps, c = chain(P2, tangent_bundle(P2))
    for d in decomps:
        chart = atlas.charts[d.cone]
        assert sorted(d.weights) == sorted(tuple(m) for m in chart.dual_basis)
        for u, v in d.frame:
            ray = P2.rays[P2.cones[d.cone][chart.dual_basis.index(u)]]
            assert v[0] * ray[1] == v[1] * ray[0]
    rep = check_cocycle(c, atlas)
    assert rep.triples == 27
    assert not c.is_diagonal()


def test_tp2_determinant_is_anticanonical():
    atlas, decomps, _ = chain(P2, tangent_bundle(P2))
    assert determinant_divisor(decomps, P2) == [1, 1, 1]


def test_direct_sum_stays_diagonal():
    data = direct_sum(line_bundle(P2, [0, 0, 1]), line_bundle(P2, [0, 0, -1]))
    atlas, _, c = chain(P2, data)
    assert c.is_diagonal()
    check_cocycle(c, atlas)


def test_incompatible_filtrations_p3():
    fx = library.get_bundle("p3/incompatible")
    with pytest.raises(IncompatibleFiltrations, match="cone 0"):
        chain(library.CONTROL_FANS["p3"], library.build(fx))


def test_corrupted_cocycle_named():
    atlas, _, c = chain(P1, line_bundle(P1, [0, 1]))
    bad = corrupt_cocycle(c, (0, 1), LaurentPoly.constant(1, 2))
    with pytest.raises(CocycleFailure, match=r"triple \(0, 1, 0\).*pair \(0, 1\)"):
        check_cocycle(bad, atlas)


def test_corrupted_triple_only():
    # a self-consistent pair change still breaks a triple on P^2
    atlas, _, c = chain(P2, line_bundle(P2, [0, 0, 1]))
    two = LaurentPoly.constant(2, 2)
    bad = corrupt_cocycle(corrupt_cocycle(c, (0, 1), two), (1, 0), two.inverse())
    with pytest.raises(CocycleFailure, match="triple"):
        check_cocycle(bad, atlas)


# -- pullback


@pytest.mark.parametrize("k", [-2, 1, 3])
def test_pullback_line_bundle_p1(k):
    atlas, _, c = chain(P1, line_bundle(P1, [0, k]))
    pulled = pullback_by_torus(c, atlas)
    assert pulled[(0, 1)] == LaurentMatrix(2, [[LaurentPoly.monomial((k, k))]])
    check_cocycle(pulled, atlas)


def test_pullback_constant_cocycle_unchanged():
    atlas, _, c = chain(P2, trivial_bundle(P2, 2))
    pulled = pullback_by_torus(c, atlas)
    for pair, m in c.matrices.items():
        assert pulled[pair] == m.embed(4)


@pytest.mark.parametrize("k", [-2, -1, 0, 1, 2])
def test_coboundary_p1(k):
    atlas, _, c = chain(P1, line_bundle(P1, [0, k]))
    w = solve_coboundary_split(c, pullback_by_torus(c, atlas))
    lam0, lam1 = w.scalings[0][0, 0], w.scalings[1][0, 0]
    assert lam0 * lam1.inverse() == LaurentPoly.monomial((0, k))


def test_coboundary_trivial_all_ones():
    atlas, _, c = chain(P1XP1, trivial_bundle(P1XP1))
    w = solve_coboundary_split(c, pullback_by_torus(c, atlas))
    for m in w.scalings.values():
        assert m == LaurentMatrix.identity(4, 1)


def test_nonexact_cocycle_rejected():
    atlas, _, c = chain(P1XP1, trivial_bundle(P1XP1))
    with pytest.raises(NoCoboundary):
        solve_coboundary_split(c, nonexact_pullback(c))


def test_non_character_ratio_rejected():
    atlas, _, c = chain(P1, line_bundle(P1, [0, 1]))
    pulled = pullback_by_torus(c, atlas)
    bad = corrupt_cocycle(pulled, (0, 1), LaurentPoly.variable(2, 0))
    with pytest.raises(NoCoboundary, match="not a character of t"):
        solve_coboundary_split(c, bad)


def test_tangent_not_split():
    atlas, _, c = chain(P2, tangent_bundle(P2))
    with pytest.raises(NotSplit):
        solve_coboundary_split(c, pullback_by_torus(c, atlas))


# -- input parsing


def test_cartier_matches_jumps():
    k = 3
    a = bundle_from_json({"cartier": {"0": [0], "1": [-k]}}, P1)
    assert a.filtrations == line_bundle(P1, [0, k]).filtrations


def test_cartier_disagreement():
    with pytest.raises(IncompatibleFiltrations):
        from_cartier(P2, {0: [0, 0], 1: [1, 0], 2: [0, 0]})


def test_bundle_json_roundtrip():
    data = tangent_bundle(P2)
    again = bundle_from_json(data.to_json(), P2)
    assert again.filtrations == data.filtrations


@pytest.mark.parametrize(
    "obj",
    [
        {"rank": 1, "filtrations": {"0": [{"jump": 0.5, "vectors": [[1]]}], "1": [{"jump": 0, "vectors": [[1]]}]}},
        {"rank": 1, "filtrations": {"0": [{"jump": 0, "vectors": [[0.5]]}]}},
        {"rank": 1, "filtrations": {"7": [{"jump": 0, "vectors": [[1]]}]}},
        {"rank": 1, "filtrations": {"0": [{"jump": 0}]}},
        {"rank": 2, "filtrations": {"0": [{"jump": 0, "vectors": [[1, 0]]}]}},
        {"rank": 1, "filtrations": {"0": [{"jump": 0, "vectors": [[1]]}, {"jump": 1, "vectors": [[1]]}]}},
        {"filtrations": {}},
        {"cartier": {"0": [0]}},
    ],
)
def test_bundle_json_rejects(obj):
    with pytest.raises(ParseError):
        bundle_from_json(obj, P1)


def test_rational_vectors_accepted():
    data = bundle_from_json(
        {"rank": 2, "filtrations": {
            "0": [{"jump": 1, "vectors": [["1/2", "3"]]}, {"jump": 0, "vectors": [[1, 0], [0, 1]]}],
            "1": [{"jump": 0, "vectors": [[1, 0], [0, 1]]}],
        }},
        P1,
    )
    assert data.subspace(0, 1) == ((Fraction(1), Fraction(6)),)
    assert data.jump_multiset(0) == [0, 1]


def test_missing_ray_filtration():
    data = KlyachkoData(1, {0: ((0, ((1,),)),)})
    with pytest.raises(ParseError, match="no filtration"):
        chain(P1, data)
