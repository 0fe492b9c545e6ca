"""Brute-force oracle: every self-map of a small finite metric space.

Finite metric spaces are compact and complete, so existence and uniqueness
claims about fixed points become exhaustively checkable there.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from random import Random
from typing import Iterator, Sequence

from .conditions import (
    BanachContraction,
    Condition,
    Contractive,
    DisplacementGuarded,
    EtaStrict,
    GlobalPsiHalf,
    SuzukiHalfStrict,
    certify_many,
    implication_expected,
)
from .errors import DegenerateInputError, ParameterError
from .metric import FiniteMetricSpace, SelfMap, space_to_dict, verify_metric_axioms
from .orbit import FIXED_POINT, iterate

MAX_ENUM = 6
MAX_CENSUS = 5


def enumerate_self_maps(n: int) -> Iterator[tuple[int, ...]]:
    """All n**n maps of {0..n-1} into itself as target-index tuples, lexicographically."""
    if not 1 <= n <= MAX_ENUM:
        raise ParameterError(f"n must be in [1, {MAX_ENUM}] (n**n maps), got {n}")
    return product(range(n), repeat=n)


def shortest_path_closure(matrix: Sequence[Sequence]) -> list[list]:
    """Floyd-Warshall closure; turns any symmetric positive weighting into a metric."""
    d = [list(row) for row in matrix]
    n = len(d)
    for k in range(n):
        dk = d[k]
        for i in range(n):
            dik = d[i][k]
            di = d[i]
            for j in range(n):
                via = dik + dk[j]
                if via < di[j]:
                    di[j] = via
    return d


def random_finite_metric(n: int, seed, max_retries: int = 100) -> FiniteMetricSpace:
    """Random symmetric weights in {0, 1/8, ..., 4}, repaired by shortest-path closure.

    A zero off-diagonal weight would glue two points together, so such draws
    are discarded and redrawn.
    """
    if n < 2:
        raise ParameterError("need n >= 2")
    rng = Random(seed)
    for _ in range(max_retries):
        w = [[Fraction(0)] * n for _ in range(n)]
        for i in range(n):
            for j in range(i + 1, n):
                w[i][j] = w[j][i] = Fraction(rng.randint(0, 32), 8)
        if any(w[i][j] == 0 for i in range(n) for j in range(n) if i != j):
            continue
        d = shortest_path_closure(w)
        space = FiniteMetricSpace([f"p{i}" for i in range(n)], d, label=f"random(n={n},seed={seed})")
        if not verify_metric_axioms(space).passed:  # pragma: no cover - closure guarantees this
            raise AssertionError("shortest-path closure produced a non-metric")
        return space
    raise DegenerateInputError(f"no nondegenerate draw after {max_retries} retries")


def discrete_space(n: int) -> FiniteMetricSpace:
    pts = [f"p{i}" for i in range(n)]
    return FiniteMetricSpace(pts, [[Fraction(int(i != j)) for j in range(n)] for i in range(n)], label=f"discrete({n})")


def _space_summary(space: FiniteMetricSpace) -> dict:
    return {"label": space.label, "n": len(space.points), **space_to_dict(space)}


DEFAULT_CHAIN = (BanachContraction(Fraction(1, 2)), Contractive(), SuzukiHalfStrict(), DisplacementGuarded())


@dataclass
class AuditReport:
    space: FiniteMetricSpace
    conditions: tuple
    maps_total: int = 0
    satisfied_counts: list = field(default_factory=list)
    violations: list = field(default_factory=list)  # (map, premise condition, failed conclusion)
    separations: dict = field(default_factory=dict)  # (a, b) -> first map with a satisfied, b violated

    @property
    def passed(self) -> bool:
        return not self.violations

    def to_dict(self) -> dict:
        names = [c.describe() for c in self.conditions]
        return {
            "space": _space_summary(self.space),
            "maps_total": self.maps_total,
            "satisfied": dict(zip(names, self.satisfied_counts)),
            "chain_violations": [
                {"map": list(t), "premise": a.describe(), "conclusion": b.describe()} for t, a, b in self.violations
            ],
            "separations": [
                {"holds": a.describe(), "fails": b.describe(), "map": list(t)}
                for (a, b), t in sorted(self.separations.items(), key=lambda kv: (kv[0][0].describe(), kv[0][1].describe()))
            ],
        }


def implication_audit(
    space: FiniteMetricSpace,
    conditions: Sequence[Condition] = DEFAULT_CHAIN,
) -> AuditReport:
    """Certify every condition for every self-map and check monotonicity along known implications."""
    n = len(space.points)
    if n > MAX_CENSUS:
        raise ParameterError(f"audit is capped at n <= {MAX_CENSUS}")
    conditions = tuple(conditions)
    report = AuditReport(space, conditions, satisfied_counts=[0] * len(conditions))
    pairs = [(a, b) for a in range(len(conditions)) for b in range(len(conditions)) if a != b]
    for table in enumerate_self_maps(n):
        tmap = SelfMap.from_indices(space, table)
        certs = certify_many(space, tmap, conditions, stop_at_first=True)
        ok = [c.satisfied for c in certs]
        report.maps_total += 1
        for i, s in enumerate(ok):
            report.satisfied_counts[i] += s
        for a, b in pairs:
            if ok[a] and not ok[b]:
                ca, cb = conditions[a], conditions[b]
                if implication_expected(ca, cb):
                    report.violations.append((table, ca, cb))
                else:
                    report.separations.setdefault((ca, cb), table)
    return report


def claims_unique_fixed_point(condition: Condition) -> bool:
    """Conditions that force the half-strict Suzuki condition, hence a unique fixed point on compact spaces."""
    return (
        implication_expected(condition, SuzukiHalfStrict())
        or isinstance(condition, (EtaStrict, GlobalPsiHalf))
    )


@dataclass
class CensusReport:
    space: FiniteMetricSpace
    condition: Condition
    maps_total: int = 0
    maps_satisfying: int = 0
    maps_satisfying_with_unique_fixed_point: int = 0
    claims_uniqueness: bool = False
    fixed_point_histogram: dict = field(default_factory=dict)  # fixed-point count -> satisfying maps
    counterexamples: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.counterexamples

    def to_dict(self) -> dict:
        return {
            "space": _space_summary(self.space),
            "condition": self.condition.name,
            "params": self.condition.params(),
            "maps_total": self.maps_total,
            "maps_satisfying": self.maps_satisfying,
            "maps_satisfying_with_unique_fixed_point": self.maps_satisfying_with_unique_fixed_point,
            "claims_uniqueness": self.claims_uniqueness,
            "fixed_point_histogram": {str(k): v for k, v in sorted(self.fixed_point_histogram.items())},
            "counterexamples": [list(t) for t in self.counterexamples],
        }


def fixed_point_census(space: FiniteMetricSpace, condition: Condition) -> CensusReport:
    """Count maps satisfying ``condition`` and their fixed points.

    When the condition guarantees a unique fixed point, every satisfying map
    must have exactly one and every orbit must reach it within n steps; maps
    that do not are listed as counterexamples. Other conditions are only
    tallied.
    """
    n = len(space.points)
    if n > MAX_CENSUS:
        raise ParameterError(f"census is capped at n <= {MAX_CENSUS}")
    report = CensusReport(space, condition, claims_uniqueness=claims_unique_fixed_point(condition))
    pts = space.points
    for table in enumerate_self_maps(n):
        report.maps_total += 1
        tmap = SelfMap.from_indices(space, table)
        if not certify_many(space, tmap, [condition], stop_at_first=True)[0].satisfied:
            continue
        report.maps_satisfying += 1
        fixed = [i for i in range(n) if table[i] == i]
        report.fixed_point_histogram[len(fixed)] = report.fixed_point_histogram.get(len(fixed), 0) + 1
        if len(fixed) == 1:
            report.maps_satisfying_with_unique_fixed_point += 1
        if not report.claims_uniqueness:
            continue
        good = len(fixed) == 1 and all(_reaches(space, tmap, x, pts[fixed[0]], n) for x in pts)
        if not good:
            report.counterexamples.append(table)
    return report


def _reaches(space, tmap, x0, z, steps) -> bool:
    trace = iterate(space, tmap, x0, steps)
    return trace.termination.kind == FIXED_POINT and trace.points[-1] == z
