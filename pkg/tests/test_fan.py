import dataclasses

import pytest

from toricconn import library
from toricconn.errors import (
    DimensionMismatch,
    FanError,
    IncompleteFan,
    Lemma1Failure,
    NonPrimitiveRay,
    NonSmoothCone,
    ParseError,
    RayNotInCone,
)
from toricconn.exact.laurent import LaurentPoly
from toricconn.fan import Fan, build_atlas, divisor_chart_index, fan_from_json, validate_fan
from toricconn.logtangent import (
    LogVectorField,
    beta_matrix,
    check_lemma1,
    transport_log_field,
)

P1 = library.FANS["p1"]
P2 = library.FANS["p2"]


def test_p1_valid():
    rep = validate_fan(P1)
    assert rep.ok and rep.complete
    assert rep.determinants == {0: 1, 1: -1}


def test_p2_valid_with_unit_determinants():
    rep = validate_fan(P2)
    assert rep.ok
    assert sorted(abs(d) for d in rep.determinants.values()) == [1, 1, 1]
    assert rep.to_json()["simple_normal_crossing"].startswith("derived")


@pytest.mark.parametrize("name", sorted(library.FANS))
def test_library_fans_valid(name):
    assert validate_fan(library.FANS[name]).ok


def test_nonprimitive_ray_named():
    f = Fan(2, ((1, 0), (0, 2)), ((0, 1),), name="bad")
    with pytest.raises(NonPrimitiveRay, match=r"ray 1 \[0, 2\]"):
        validate_fan(f)


def test_nonsmooth_cone_named():
    with pytest.raises(NonSmoothCone, match=r"cone 0 \[0, 1\] has determinant 2"):
        validate_fan(library.CONTROL_FANS["p2_nonsmooth"])


def test_incomplete_fan_single_cone():
    f = Fan(2, ((1, 0), (0, 1)), ((0, 1),))
    with pytest.raises(IncompleteFan):
        validate_fan(f)


def test_incomplete_fan_missing_cone():
    f = Fan(2, P2.rays, P2.cones[:2])
    with pytest.raises(IncompleteFan, match="facet"):
        validate_fan(f)


def test_overlapping_fan_rejected():
    # two copies of the P^2 fan glued along matching facets cover the plane twice
    rays = ((1, 0), (0, 1), (-1, -1), (1, 1), (-1, 0), (0, -1))
    cones = ((0, 1), (1, 4), (4, 5), (5, 0), (0, 3), (3, 1))
    with pytest.raises(FanError):
        validate_fan(Fan(2, rays, cones))


def test_structure_errors():
    with pytest.raises(FanError, match="duplicates"):
        validate_fan(Fan(1, ((1,), (1,)), ((0,), (1,))))
    with pytest.raises(FanError, match="missing ray"):
        validate_fan(Fan(1, ((1,), (-1,)), ((0,), (2,))))


def test_fan_json_roundtrip():
    f = fan_from_json(P2.to_json())
    assert f.rays == P2.rays and f.cones == P2.cones


@pytest.mark.parametrize(
    "obj",
    [
        {"rank": 1, "rays": [[1.0], [-1]], "cones": [[0], [1]]},
        {"rank": 1, "rays": [[1], [-1]]},
        {"rank": "2", "rays": [[1, 0]], "cones": [[0]]},
        [],
    ],
)
def test_fan_json_rejects(obj):
    with pytest.raises(ParseError):
        fan_from_json(obj)


def test_divisor_chart_index():
    assert divisor_chart_index(P1, 0, 0) == 0
    assert divisor_chart_index(P2, 1, 0) == 1
    assert divisor_chart_index(P2, 1, 1) == 0
    with pytest.raises(RayNotInCone):
        divisor_chart_index(P2, 2, 0)


def test_dual_bases():
    atlas = build_atlas(P1)
    assert atlas.charts[0].dual_basis == ((1,),)
    assert atlas.charts[1].dual_basis == ((-1,),)
    atlas = build_atlas(P2)
    # rays (0,1), (-1,-1): m1 = (-1, 1), m2 = (-1, 0) by hand
    assert atlas.charts[1].dual_basis == ((-1, 1), (-1, 0))


def test_self_transition_is_identity():
    atlas = build_atlas(library.FANS["f2"])
    for k in atlas.cone_indices():
        assert atlas.transitions[(k, k)].exponent_matrix == ((1, 0), (0, 1))


def test_p1_transition_inverts():
    atlas = build_atlas(P1)
    x = LaurentPoly.variable(1, 0)
    assert atlas.rewrite(x, 0, 1) == x.inverse()
    assert atlas.rewrite(x ** 3, 1, 0) == x ** -3


@pytest.mark.parametrize("name", sorted(library.FANS))
def test_transitions_compose(name):
    atlas = build_atlas(library.FANS[name])
    n = atlas.n
    p = sum((LaurentPoly.variable(n, i) * (i + 2) for i in range(n)), LaurentPoly.zero(n))
    for s in atlas.cone_indices():
        for t in atlas.cone_indices():
            for u in atlas.cone_indices():
                assert atlas.rewrite(atlas.rewrite(p, s, t), t, u) == atlas.rewrite(p, s, u)


def test_character_restriction():
    atlas = build_atlas(P2)
    # chi^u restricted to cone {1,2}: exponents <u, v_i>
    assert atlas.charts[1].character_exponent((2, 3)) == (3, -5)


# -- log tangent


def test_lemma1_p1():
    rep = check_lemma1(build_atlas(P1))
    assert rep.determinants == {0: 1, 1: -1}


def test_lemma1_f2():
    rep = check_lemma1(build_atlas(library.FANS["f2"]))
    assert len(rep.determinants) == 4
    assert all(abs(d) == 1 for d in rep.determinants.values())
    assert rep.transported_pairs == 16


def test_lemma1_corrupted_dual_basis():
    atlas = build_atlas(P2)
    bad = dataclasses.replace(atlas.charts[0], dual_basis=((2, 0), (0, 1)))
    corrupted = dataclasses.replace(atlas, charts=[bad] + list(atlas.charts[1:]))
    with pytest.raises(Lemma1Failure, match="cone 0: det beta = 2"):
        check_lemma1(corrupted)


def test_beta_matrix_is_dual_basis():
    atlas = build_atlas(P2)
    assert beta_matrix(atlas, 1).matrix == ((-1, 1), (-1, 0))
    assert abs(beta_matrix(atlas, 1).det) == 1


def test_transport_p1_euler_field():
    # x d/dx on chart 0 is -y d/dy on chart 1 (y = 1/x)
    atlas = build_atlas(P1)
    moved = transport_log_field(atlas, LogVectorField.constant([1]), 0, 1)
    assert moved == LogVectorField.constant([-1])


def test_transport_identity():
    atlas = build_atlas(P2)
    x, y = LaurentPoly.variable(2, 0), LaurentPoly.variable(2, 1)
    field = LogVectorField([x * y, y.inverse()])
    assert transport_log_field(atlas, field, 2, 2) == field
    assert not field.is_logarithmic()


def test_transport_dimension_mismatch():
    atlas = build_atlas(P2)
    with pytest.raises(DimensionMismatch):
        transport_log_field(atlas, LogVectorField.constant([1]), 0, 1)
