"""Metric spaces, self-maps and metric axiom verification."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from random import Random
from typing import Any, Callable, Hashable, Iterable, Mapping, Sequence

from .errors import BoundaryError, DomainError, MetricAxiomError, ParameterError
from .scalar import EXACT, Exact, Policy, Scalar, format_scalar, parse_rational

Point = Hashable


class MetricSpace:
    """Carrier plus distance. Subclasses fill in ``distance`` and membership.

    ``points`` is the materialized carrier, or ``None`` for carriers that are
    only described by a membership predicate.
    """

    label: str = ""
    policy: Policy = EXACT
    points: tuple | None = None

    def distance(self, x: Point, y: Point) -> Scalar:
        raise NotImplementedError

    def __contains__(self, x: object) -> bool:
        raise NotImplementedError

    def coordinate(self, x: Point) -> Scalar | None:
        return None

    @property
    def is_finite(self) -> bool:
        return self.points is not None

    def _check(self, *xs: Point) -> None:
        for x in xs:
            if x not in self:
                raise DomainError(f"{x!r} is not a point of {self.label or 'the space'}")


class FiniteMetricSpace(MetricSpace):
    """Explicit distance matrix over named points.

    Construction only checks the shape; run :func:`verify_metric_axioms` (or
    load through :func:`load_space_json`, which does) to certify the metric.
    """

    def __init__(
        self,
        points: Sequence[Point],
        matrix: Sequence[Sequence[Scalar]],
        label: str = "",
        policy: Policy = EXACT,
    ):
        n = len(points)
        if n == 0:
            raise ParameterError("a metric space needs at least one point")
        if len(set(points)) != n:
            raise ParameterError("duplicate point identifiers")
        if len(matrix) != n or any(len(row) != n for row in matrix):
            raise ParameterError(f"distance matrix must be {n}x{n}")
        self.points = tuple(points)
        self.matrix = tuple(tuple(row) for row in matrix)
        self.label = label
        self.policy = policy
        self._index = {p: i for i, p in enumerate(self.points)}

    def __contains__(self, x: object) -> bool:
        try:
            return x in self._index
        except TypeError:
            return False

    def __len__(self) -> int:
        return len(self.points)

    def __repr__(self) -> str:
        return f"FiniteMetricSpace(label={self.label!r}, n={len(self.points)})"

    def index(self, x: Point) -> int:
        try:
            return self._index[x]
        except (KeyError, TypeError):
            raise DomainError(f"unknown point {x!r}") from None

    def distance(self, x: Point, y: Point) -> Scalar:
        return self.matrix[self.index(x)][self.index(y)]


class LineSpace(MetricSpace):
    """Finitely many named points on the real line; ``d(x, y) = |c(x) - c(y)|``."""

    def __init__(self, coords: Mapping[Point, Scalar], label: str = "", policy: Policy = EXACT):
        if not coords:
            raise ParameterError("a metric space needs at least one point")
        values = list(coords.values())
        if len(set(values)) != len(values):
            raise ParameterError("line embedding must be injective (duplicate coordinate)")
        self.coords = dict(coords)
        self.points = tuple(coords)
        self.label = label
        self.policy = policy

    def __contains__(self, x: object) -> bool:
        try:
            return x in self.coords
        except TypeError:
            return False

    def __len__(self) -> int:
        return len(self.points)

    def __repr__(self) -> str:
        return f"LineSpace(label={self.label!r}, n={len(self.points)})"

    def coordinate(self, x: Point) -> Scalar:
        try:
            return self.coords[x]
        except (KeyError, TypeError):
            raise DomainError(f"unknown point {x!r}") from None

    def distance(self, x: Point, y: Point) -> Scalar:
        return abs(self.coordinate(x) - self.coordinate(y))


class LazyLineSpace(MetricSpace):
    """Subset of the line given by a membership predicate; points are their own coordinates."""

    def __init__(
        self,
        member: Callable[[Any], bool],
        label: str = "",
        policy: Policy = EXACT,
        sampler: Callable[[Random], Scalar] | None = None,
    ):
        self.member = member
        self.label = label
        self.policy = policy
        self.sampler = sampler

    def __contains__(self, x: object) -> bool:
        try:
            return bool(self.member(x))
        except TypeError:
            return False

    def __repr__(self) -> str:
        return f"LazyLineSpace(label={self.label!r})"

    def coordinate(self, x: Point) -> Scalar:
        self._check(x)
        return x

    def distance(self, x: Point, y: Point) -> Scalar:
        self._check(x, y)
        return abs(x - y)

    def sample(self, rng: Random) -> Scalar:
        if self.sampler is None:
            raise ParameterError(f"{self.label or 'space'} has no sampler")
        return self.sampler(rng)


def distance(space: MetricSpace, x: Point, y: Point) -> Scalar:
    return space.distance(x, y)


@dataclass(frozen=True, eq=False)
class SelfMap:
    """A map of a carrier into itself.

    ``domain`` is the materialized certification domain (``None`` when the
    domain is only known through ``in_domain``). Truncated gallery carriers
    leave their edge points out of the domain.
    """

    rule: Callable[[Point], Point]
    domain: tuple | None = None
    in_domain: Callable[[Point], bool] | None = None
    table: Mapping[Point, Point] | None = None
    sampler: Callable[[Random], Point] | None = None
    label: str = ""

    @classmethod
    def from_table(cls, table: Mapping[Point, Point], label: str = "", domain: Iterable[Point] | None = None):
        table = dict(table)
        dom = tuple(table) if domain is None else tuple(domain)
        missing = [x for x in dom if x not in table]
        if missing:
            raise ParameterError(f"table is not total on its domain; missing {missing[:3]!r}")
        return cls(rule=table.__getitem__, domain=dom, table=table, label=label)

    @classmethod
    def from_indices(cls, space: FiniteMetricSpace | LineSpace, targets: Sequence[int], label: str = ""):
        """Table map given as target indices into ``space.points``."""
        pts = space.points
        if len(targets) != len(pts) or any(not 0 <= t < len(pts) for t in targets):
            raise ParameterError("map table must list one valid target index per point")
        return cls.from_table({p: pts[t] for p, t in zip(pts, targets)}, label=label)

    def contains(self, x: Point) -> bool:
        if self.in_domain is not None:
            try:
                return bool(self.in_domain(x))
            except TypeError:
                return False
        if self.domain is not None:
            return x in self._domain_set
        return True

    @property
    def _domain_set(self) -> frozenset:
        cached = self.__dict__.get("_dset")
        if cached is None:
            cached = frozenset(self.domain)
            object.__setattr__(self, "_dset", cached)
        return cached

    def __call__(self, x: Point) -> Point:
        return apply(self, x)

    def sample(self, rng: Random) -> Point:
        if self.sampler is not None:
            return self.sampler(rng)
        if self.domain:
            return self.domain[rng.randrange(len(self.domain))]
        raise ParameterError(f"map {self.label!r} has no way to sample its domain")

    def compose(self, other: SelfMap) -> SelfMap:
        """``self ∘ other`` on the part of ``other``'s domain that ``self`` accepts."""
        if self.domain is None or other.domain is None:
            return SelfMap(rule=lambda x: apply(self, apply(other, x)), label=f"{self.label}∘{other.label}")
        dom = [x for x in other.domain if self.contains(apply(other, x))]
        return SelfMap.from_table({x: apply(self, apply(other, x)) for x in dom}, label=f"{self.label}∘{other.label}")

    def as_indices(self, space: MetricSpace) -> list[int]:
        """Table as target indices into ``space.points`` (finite spaces only)."""
        index = {p: i for i, p in enumerate(space.points)}
        return [index[apply(self, p)] for p in space.points]


def apply(tmap: SelfMap, x: Point) -> Point:
    if not tmap.contains(x):
        raise BoundaryError(f"{x!r} is outside the domain of {tmap.label or 'the map'}")
    return tmap.rule(x)


def identity_map(space: MetricSpace) -> SelfMap:
    if space.points is None:
        return SelfMap(rule=lambda x: x, in_domain=space.__contains__, label="identity")
    return SelfMap.from_table({p: p for p in space.points}, label="identity")


def check_self_map(space: MetricSpace, tmap: SelfMap) -> None:
    """Raise if the map's materialized domain leaves the carrier or maps outside it."""
    if tmap.domain is None:
        return
    for x in tmap.domain:
        if x not in space:
            raise DomainError(f"domain point {x!r} is not in the carrier")
        y = apply(tmap, x)
        if y not in space:
            raise DomainError(f"T({x!r}) = {y!r} is not in the carrier")


# --------------------------------------------------------------------------
# axiom verification


@dataclass(frozen=True)
class Violation:
    axiom: str
    witness: tuple
    lhs: Scalar
    rhs: Scalar

    def to_dict(self) -> dict:
        return {
            "axiom": self.axiom,
            "witness": [str(w) for w in self.witness],
            "lhs": format_scalar(self.lhs),
            "rhs": format_scalar(self.rhs),
        }


@dataclass(frozen=True)
class AxiomReport:
    violations: tuple[Violation, ...] = field(default_factory=tuple)
    points_checked: int = 0

    @property
    def passed(self) -> bool:
        return not self.violations

    def to_dict(self) -> dict:
        return {
            "passed": self.passed,
            "points_checked": self.points_checked,
            "violations": [v.to_dict() for v in self.violations],
        }


def _integer_rows(rows: list[list[Scalar]]) -> tuple[list[list[int]], int] | None:
    """Scale an all-rational matrix to integers (for a fast exact triangle scan)."""
    if any(isinstance(v, float) for row in rows for v in row):
        return None
    scale = 1
    for row in rows:
        for v in row:
            scale = math.lcm(scale, Fraction(v).denominator)
    return [[int(v * scale) for v in row] for row in rows], scale


def verify_metric_axioms(
    space: MetricSpace,
    subset: Sequence[Point] | None = None,
    max_violations: int = 10,
) -> AxiomReport:
    """Check identity, positivity, symmetry and the triangle inequality over ``subset``.

    All pairs and ordered triples are examined; the first ``max_violations``
    findings (in index order) are reported.
    """
    pts = list(space.points if subset is None else subset)
    if subset is None and space.points is None:
        raise ParameterError("lazy carriers need an explicit subset to verify")
    if not pts:
        raise ParameterError("subset must contain at least one point")
    space._check(*pts)
    pol = space.policy
    n = len(pts)
    rows = [[space.distance(x, y) for y in pts] for x in pts]
    found: list[Violation] = []

    def add(v: Violation) -> bool:
        found.append(v)
        return len(found) >= max_violations

    def report() -> AxiomReport:
        return AxiomReport(tuple(found), n)

    for i in range(n):
        if not pol.is_zero(rows[i][i]) and add(Violation("identity", (pts[i],), rows[i][i], 0)):
            return report()
    for i in range(n):
        for j in range(n):
            if i != j and not pol.lt(0, rows[i][j]):
                if add(Violation("positivity", (pts[i], pts[j]), rows[i][j], 0)):
                    return report()
    for i in range(n):
        for j in range(i + 1, n):
            if not pol.eq(rows[i][j], rows[j][i]):
                if add(Violation("symmetry", (pts[i], pts[j]), rows[i][j], rows[j][i])):
                    return report()

    scaled = _integer_rows(rows)
    if scaled is not None:
        grid = scaled[0]
        slack = 0
    else:
        grid = rows
        slack = getattr(pol, "eps", 0.0)
    # d(x, z) <= d(x, y) + d(y, z), witness (x, y, z)
    for i in range(n):
        row_i = grid[i]
        for k in range(n):
            dik = grid[i][k] + slack
            row_k = grid[k]
            if not any(c > dik + b for b, c in zip(row_k, row_i)):
                continue
            for j in range(n):
                if row_i[j] > dik + row_k[j]:
                    lhs, rhs = rows[i][j], rows[i][k] + rows[k][j]
                    if add(Violation("triangle", (pts[i], pts[k], pts[j]), lhs, rhs)):
                        return report()
    return report()


# --------------------------------------------------------------------------
# JSON interchange


def space_from_dict(doc: Mapping[str, Any], policy: Policy = EXACT) -> FiniteMetricSpace:
    try:
        points = list(doc["points"])
        raw = doc["matrix"]
    except (KeyError, TypeError) as exc:
        raise ParameterError(f"space document needs 'points' and 'matrix': {exc}") from exc
    if isinstance(policy, Exact):
        matrix = [[parse_rational(v) for v in row] for row in raw]
    else:
        matrix = [[float(parse_rational(v)) for v in row] for row in raw]
    return FiniteMetricSpace(points, matrix, label=str(doc.get("label", "")), policy=policy)


def load_space_json(source: str | Path | Mapping[str, Any], policy: Policy = EXACT) -> FiniteMetricSpace:
    """Load a finite explicit space and gate it on the metric axioms."""
    if isinstance(source, Mapping):
        doc = source
    else:
        try:
            doc = json.loads(Path(source).read_text())
        except json.JSONDecodeError as exc:
            raise ParameterError(f"malformed space file {source}: {exc}") from exc
    space = space_from_dict(doc, policy)
    report = verify_metric_axioms(space)
    if not report.passed:
        first = report.violations[0]
        raise MetricAxiomError(
            f"{space.label or 'space'} is not a metric: {first.axiom} fails at {first.witness!r}", report
        )
    return space


def space_to_dict(space: FiniteMetricSpace | LineSpace) -> dict:
    pts = space.points
    return {
        "label": space.label,
        "points": [str(p) for p in pts],
        "matrix": [[format_scalar(space.distance(x, y)) for y in pts] for x in pts],
    }
