import json
from fractions import Fraction as F

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fixlab.conditions import DisplacementGuarded, SuzukiHalfStrict, certify
from fixlab.enumerator import random_finite_metric
from fixlab.errors import DomainError, ParameterError
from fixlab.gallery import divergent_contractive_map, halving_map, suzuki_space
from fixlab.metric import LineSpace, SelfMap, identity_map
from fixlab.orbit import (
    BOUNDARY,
    FIXED_POINT,
    MAX_STEPS,
    DiagnosticThresholds,
    _scan_generic,
    capital_delta,
    cauchy_estimate,
    extract_psi,
    fixed_point_of,
    iterate,
    orbit_csv,
    psi_curve,
    replay_witness,
    sequential_diagnostic,
    witnesses_to_json,
)


def test_halving_orbit_gaps():
    space, tmap = halving_map()
    trace = iterate(space, tmap, F(1), 10)
    assert trace.termination.kind == MAX_STEPS
    assert trace.deltas[9] == F(1, 2**10)
    assert all(trace.deltas[n] == space.distance(trace.points[n], trace.points[n + 1]) for n in range(10))


def test_suzuki_orbit_from_zero():
    space, tmap = suzuki_space("3/5", 10, "3/4")
    trace = iterate(space, tmap, "0", 50)
    assert trace.points[:5] == ("0", "1", "u0", "u1", "u2")
    assert trace.termination == type(trace.termination)(BOUNDARY, 12)
    assert trace.points[-1] == "u10"
    assert fixed_point_of(trace) is None


def test_divergent_orbit_exact():
    space, tmap = divergent_contractive_map()
    trace = iterate(space, tmap, F(1), 3)
    assert trace.points == (1, 2, F(5, 2), F(29, 10))


def test_identity_trace_is_fixed_at_start():
    space, tmap = halving_map()
    trace = iterate(space, identity_map(space), F(1, 3), 5)
    assert trace.termination.kind == FIXED_POINT and trace.termination.index == 0
    assert fixed_point_of(trace) == (F(1, 3), 0)


def test_truncated_halving_table_reaches_zero():
    pts = [F(1), F(1, 2), F(1, 4), F(0)]
    space = LineSpace({p: p for p in pts})
    tmap = SelfMap.from_table({F(1): F(1, 2), F(1, 2): F(1, 4), F(1, 4): F(0), F(0): F(0)})
    trace = iterate(space, tmap, F(1), 20)
    assert fixed_point_of(trace) == (F(0), 0)
    k = trace.termination.index
    assert trace.deltas[k] == 0 and all(p == trace.points[k] for p in trace.points[k:])


def test_float_fixed_point_uses_epsilon():
    space, tmap = halving_map("float", eps=1e-9)
    trace = iterate(space, tmap, 1.0, 200)
    point, residual = fixed_point_of(trace)
    assert 0 < residual <= 1e-9
    assert trace.deltas[trace.termination.index - 1] > 1e-9


def test_iterate_rejects_bad_start():
    space, tmap = halving_map()
    with pytest.raises(DomainError):
        iterate(space, tmap, F(2), 5)
    with pytest.raises(ParameterError):
        iterate(space, tmap, F(1), 0)


# -- capital delta ------------------------------------------------------------


def test_capital_delta_cases():
    space, tmap = halving_map()
    trace = iterate(space, tmap, F(1), 20)
    assert capital_delta(space, tmap, trace, 3, 3) == 0
    for p, q in [(0, 1), (2, 9), (11, 4)]:
        assert capital_delta(space, tmap, trace, p, q) == F(1, 2)
    with pytest.raises(DomainError):
        capital_delta(space, tmap, trace, 0, 99)


def test_capital_delta_divergent_closed_form():
    space, tmap = divergent_contractive_map()
    trace = iterate(space, tmap, F(1), 6)
    for p in range(6):
        for q in range(p + 1, 6):
            xp, xq = trace.points[p], trace.points[q]
            direct = abs(tmap(xp) - tmap(xq)) / abs(xp - xq)
            assert capital_delta(space, tmap, trace, p, q) == direct == 1 - 1 / (xp * xq)


# -- sequential diagnostic -------------------------------------------------------


def test_halving_has_no_evidence():
    space, tmap = halving_map()
    trace = iterate(space, tmap, F(1), 120)
    res = sequential_diagnostic(space, tmap, trace, DiagnosticThresholds(horizon=500))
    assert res.found == 0 and not res and res.clamped and res.horizon == 119


def test_divergent_has_evidence_and_witnesses_replay():
    space, tmap = divergent_contractive_map("float")
    trace = iterate(space, tmap, 1.0, 400)
    th = DiagnosticThresholds(F(1, 100), F(1, 2), 400)
    res = sequential_diagnostic(space, tmap, trace, th, limit=None)
    assert res.found > 0 and len(res) == res.found
    for w in res:
        xp, xq = trace.points[w.p], trace.points[w.q]
        assert xp * xq >= 100 * (1 - 1e-9)
        assert abs(xp - xq) >= 0.5 - 1e-12
        assert replay_witness(space, tmap, trace, w)
    assert [(w.p, w.q) for w in res] == sorted((w.p, w.q) for w in res)


def test_fast_float_scan_matches_generic():
    space, tmap = divergent_contractive_map("float")
    trace = iterate(space, tmap, 1.0, 300)
    th = DiagnosticThresholds(F(1, 50), F(1, 3), 300)
    fast = sequential_diagnostic(space, tmap, trace, th, limit=None)
    found, slow = _scan_generic(space, trace, th, fast.horizon, None)
    assert found == fast.found
    assert list(fast.witnesses) == slow


def test_exact_divergent_scan_matches_float_indices():
    exact_space, exact_map = divergent_contractive_map()
    trace = iterate(exact_space, exact_map, F(1), 14)
    th = DiagnosticThresholds(F(1, 10), F(1, 2), 14)
    res = sequential_diagnostic(exact_space, exact_map, trace, th, limit=None)
    brute = []
    pts = trace.points
    for p in range(14):
        for q in range(p + 1, 14):
            delta = abs(pts[p] - pts[q])
            Delta = abs(pts[p + 1] - pts[q + 1]) / delta
            if abs(pts[p] - pts[p + 1]) <= delta and Delta >= F(9, 10) and delta >= F(1, 2):
                brute.append((p, q))
    assert [(w.p, w.q) for w in res] == brute and brute


def test_witness_limit_keeps_count():
    space, tmap = divergent_contractive_map("float")
    trace = iterate(space, tmap, 1.0, 300)
    res = sequential_diagnostic(space, tmap, trace, DiagnosticThresholds(F(1, 100), F(1, 2), 300), limit=5)
    assert len(res) == 5 and res.found > 5


def test_thresholds_validate():
    for kwargs in [dict(eps_Delta=F(0)), dict(eps_Delta=F(1)), dict(eps_delta=F(0)), dict(horizon=0)]:
        with pytest.raises(ParameterError):
            DiagnosticThresholds(**kwargs)


@settings(max_examples=80, deadline=None)
@given(n=st.integers(2, 5), seed=st.integers(0, 10**6), data=st.data())
def test_displacement_guarded_orbits_have_decreasing_gaps(n, seed, data):
    space = random_finite_metric(n, seed)
    t = data.draw(st.lists(st.integers(0, n - 1), min_size=n, max_size=n))
    tmap = SelfMap.from_indices(space, t)
    if not certify(space, tmap, DisplacementGuarded()).satisfied:
        return
    for x0 in space.points:
        trace = iterate(space, tmap, x0, 3 * n)
        gaps = trace.deltas
        if trace.termination.kind == FIXED_POINT:
            gaps = gaps[: trace.termination.index]
        assert all(a > b for a, b in zip(gaps, gaps[1:]))
        for p in range(len(trace) - 1):
            for q in range(p + 1, len(trace) - 1):
                xp, xq = trace.points[p], trace.points[q]
                if space.distance(xp, trace.points[p + 1]) <= space.distance(xp, xq):
                    assert capital_delta(space, tmap, trace, p, q) <= 1


# -- psi ---------------------------------------------------------------------------


def _feasible(trace, space, s, H):
    pts = trace.points
    return any(
        space.distance(pts[n], pts[n + 1]) <= s <= space.distance(pts[n], pts[m])
        for n in range(H + 1)
        for m in range(H + 1)
    )


def test_extract_psi_on_halving_orbit():
    space, tmap = halving_map()
    trace = iterate(space, tmap, F(1), 30)
    H = 20
    probes = [F(0), F(1), F(3, 4), F(3, 5), F(1, 2), F(1, 3), F(1, 2**10), F(1, 2**22), F(1, 2**30)]
    for s in probes:
        expected = F(1, 2) if _feasible(trace, space, s, H) else 0
        assert extract_psi(space, tmap, trace, s, H) == expected
    assert extract_psi(space, tmap, trace, F(3, 5), H) == F(1, 2)
    assert extract_psi(space, tmap, trace, F(1), H) == 0
    assert psi_curve(space, tmap, trace, probes, H) == [extract_psi(space, tmap, trace, s, H) for s in probes]


def test_extract_psi_monotone_in_horizon():
    space, tmap = divergent_contractive_map()
    trace = iterate(space, tmap, F(1), 9)
    for s in [F(1, 4), F(1, 2), F(1), F(2)]:
        vals = [extract_psi(space, tmap, trace, s, h) for h in range(9)]
        assert all(a <= b for a, b in zip(vals, vals[1:]))


@settings(max_examples=60, deadline=None)
@given(n=st.integers(2, 5), seed=st.integers(0, 10**6), data=st.data())
def test_extract_psi_bounded_under_half_strict(n, seed, data):
    space = random_finite_metric(n, seed)
    t = data.draw(st.lists(st.integers(0, n - 1), min_size=n, max_size=n))
    tmap = SelfMap.from_indices(space, t)
    if not certify(space, tmap, SuzukiHalfStrict()).satisfied:
        return
    trace = iterate(space, tmap, space.points[0], n + 1)
    for s in sorted({v for row in space.matrix for v in row}) + [F(1, 3)]:
        assert 0 <= extract_psi(space, tmap, trace, s, n) <= 1


# -- misc ---------------------------------------------------------------------------


def test_cauchy_estimate():
    space, tmap = halving_map()
    trace = iterate(space, tmap, F(1), 20)
    assert cauchy_estimate(trace, 5) == F(1, 2**16) - F(1, 2**20)
    const = iterate(space, identity_map(space), F(1, 2), 3)
    assert cauchy_estimate(const, 2) == 0
    dspace, dmap = divergent_contractive_map("float")
    dtrace = iterate(dspace, dmap, 1.0, 2000)
    assert cauchy_estimate(dtrace, 100) >= 1
    with pytest.raises(ParameterError):
        cauchy_estimate(trace, 0)


def test_csv_and_witness_export():
    space, tmap = suzuki_space("3/5", 5, "3/4")
    trace = iterate(space, tmap, "0", 3)
    text = orbit_csv(trace)
    assert text.splitlines() == [
        "n,point_id,coordinate,delta_n",
        "0,0,0,1",
        "1,1,1,3/4",
        "2,u0,1/4,7/16",
        "3,u1,-3/16,",
    ]
    dspace, dmap = divergent_contractive_map("float")
    dtrace = iterate(dspace, dmap, 1.0, 300)
    res = sequential_diagnostic(dspace, dmap, dtrace, DiagnosticThresholds(F(1, 100), F(1, 2), 300), limit=3)
    doc = json.loads(witnesses_to_json(res))
    assert len(doc) == 3 and set(doc[0]) == {"p", "q", "delta", "Delta", "premise_ok"}
