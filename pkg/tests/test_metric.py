from fractions import Fraction as F
from itertools import product

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fixlab.errors import BoundaryError, DomainError, MetricAxiomError, ParameterError
from fixlab.gallery import suzuki_space
from fixlab.metric import (
    FiniteMetricSpace,
    LineSpace,
    SelfMap,
    apply,
    check_self_map,
    distance,
    identity_map,
    load_space_json,
    space_to_dict,
    verify_metric_axioms,
)


def matrix_space(rows, names="abc"):
    n = len(rows)
    return FiniteMetricSpace(list(names[:n]), [[F(v) for v in row] for row in rows])


def test_discrete_three_points_pass():
    report = verify_metric_axioms(matrix_space([[0, 1, 1], [1, 0, 1], [1, 1, 0]]))
    assert report.passed and report.violations == ()


def test_asymmetry_is_reported():
    report = verify_metric_axioms(matrix_space([[0, 1], [2, 0]]))
    assert not report.passed
    v = report.violations[0]
    assert (v.axiom, v.witness, v.lhs, v.rhs) == ("symmetry", ("a", "b"), 1, 2)


def _triangle_oracle(rows, names):
    # every ordered triple, in (x, y, z) order
    n = len(rows)
    return [
        (names[i], names[k], names[j], rows[i][j], rows[i][k] + rows[k][j])
        for i, k, j in product(range(n), repeat=3)
        if rows[i][j] > rows[i][k] + rows[k][j]
    ]


def test_triangle_violation_matches_enumeration():
    rows = [[0, 1, 5], [1, 0, 1], [5, 1, 0]]
    expected = _triangle_oracle(rows, "abc")
    assert expected[0] == ("a", "b", "c", 5, 2)
    report = verify_metric_axioms(matrix_space(rows))
    tri = [v for v in report.violations if v.axiom == "triangle"]
    assert [(*v.witness, v.lhs, v.rhs) for v in tri] == expected


def test_identity_and_positivity():
    report = verify_metric_axioms(matrix_space([[1, 1], [1, 0]]))
    assert [v.axiom for v in report.violations] == ["identity"]
    report = verify_metric_axioms(matrix_space([[0, 0], [0, 0]]))
    assert {v.axiom for v in report.violations} == {"positivity"}


def test_max_violations_caps_report():
    rows = [[0, 1, 9, 9], [1, 0, 1, 9], [9, 1, 0, 1], [9, 9, 1, 0]]
    report = verify_metric_axioms(matrix_space(rows, "abcd"), max_violations=2)
    assert len(report.violations) == 2


def test_unknown_subset_point_is_domain_error():
    with pytest.raises(DomainError):
        verify_metric_axioms(matrix_space([[0, 1], [1, 0]]), subset=["a", "zz"])


def test_line_distance_exact():
    space = LineSpace({"p": F(1, 4), "q": F(-3, 16)})
    assert distance(space, "p", "q") == F(7, 16)
    assert distance(space, "q", "p") == F(7, 16)
    assert distance(space, "p", "p") == 0


def test_finite_lookup_and_unknown_point():
    space = matrix_space([[0, 1], [1, 0]])
    assert distance(space, "a", "b") == 1
    with pytest.raises(DomainError):
        distance(space, "a", "nope")


def test_line_rejects_duplicate_coordinates():
    with pytest.raises(ParameterError):
        LineSpace({"p": F(1), "q": F(1)})


def test_apply_gallery_and_identity():
    space, tmap = suzuki_space("3/5", 10, "3/4")
    assert apply(tmap, "0") == "1"
    assert apply(tmap, "1") == "u0"
    ident = identity_map(space)
    assert all(apply(ident, x) == x for x in space.points)


def test_apply_outside_domain_is_boundary_error():
    space, tmap = suzuki_space("3/5", 10, "3/4")
    with pytest.raises(BoundaryError):
        apply(tmap, "u10")


def test_check_self_map_flags_escape():
    space = matrix_space([[0, 1], [1, 0]])
    check_self_map(space, SelfMap.from_indices(space, [1, 0]))
    with pytest.raises(DomainError):
        check_self_map(space, SelfMap.from_table({"a": "zz", "b": "a"}))


def test_table_map_must_be_total():
    with pytest.raises(ParameterError):
        SelfMap.from_table({"a": "b"}, domain=["a", "b"])


@settings(max_examples=60, deadline=None)
@given(st.integers(2, 5).flatmap(lambda n: st.tuples(st.just(n), st.lists(st.integers(0, n - 1), min_size=n, max_size=n))))
def test_apply_twice_equals_squared_table(case):
    n, targets = case
    space = FiniteMetricSpace(list(range(n)), [[F(int(i != j)) for j in range(n)] for i in range(n)])
    tmap = SelfMap.from_indices(space, targets)
    sq = tmap.compose(tmap)
    assert all(apply(tmap, apply(tmap, x)) == apply(sq, x) == targets[targets[x]] for x in space.points)


def test_json_round_trip_and_gate(tmp_path):
    doc = {"label": "tri", "points": ["a", "b", "c"], "matrix": [["0", "1/2", "1"], ["1/2", "0", "1/2"], ["1", "1/2", "0"]]}
    space = load_space_json(doc)
    assert distance(space, "a", "c") == 1
    assert space_to_dict(space) == doc
    bad = dict(doc, matrix=[["0", "1/2", "5"], ["1/2", "0", "1/2"], ["5", "1/2", "0"]])
    path = tmp_path / "bad.json"
    import json

    path.write_text(json.dumps(bad))
    with pytest.raises(MetricAxiomError) as exc:
        load_space_json(path)
    assert exc.value.report.violations[0].axiom == "triangle"


def test_float_backend_load():
    from fixlab.scalar import Epsilon

    space = load_space_json({"points": ["a", "b"], "matrix": [["0", "0.1"], ["0.1", "0"]]}, Epsilon(1e-12))
    assert isinstance(distance(space, "a", "b"), float)
