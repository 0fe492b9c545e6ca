"""Picard iteration with gap/ratio diagnostics and finite-horizon Cauchy checks."""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass
from fractions import Fraction
from typing import IO, Iterable, Sequence

import numpy as np

from .errors import BoundaryError, DomainError, ParameterError
from .metric import LazyLineSpace, LineSpace, MetricSpace, Point, SelfMap, apply
from .scalar import Epsilon, Scalar, format_scalar, parse_rational, ratio

MAX_STEPS = "max_steps"
FIXED_POINT = "fixed_point"
BOUNDARY = "carrier_boundary"


@dataclass(frozen=True)
class Termination:
    kind: str
    index: int | None = None

    def to_dict(self) -> dict:
        return {"kind": self.kind, "index": self.index}


@dataclass(frozen=True, eq=False)
class OrbitTrace:
    """Record of x_0, ..., x_N with consecutive gaps ``deltas[n] = d(x_n, x_{n+1})``.

    ``FixedPointHit(k)`` stores one extra point x_{k+1} = T x_k so that
    ``deltas[k]`` is the (zero, or sub-epsilon) residual.
    """

    points: tuple
    deltas: tuple
    termination: Termination
    space: MetricSpace
    map: SelfMap

    def __len__(self) -> int:
        return len(self.points)

    def successor(self, i: int) -> Point:
        if not 0 <= i < len(self.points):
            raise DomainError(f"index {i} outside trace of length {len(self.points)}")
        if i + 1 < len(self.points):
            return self.points[i + 1]
        try:
            return apply(self.map, self.points[i])
        except BoundaryError as exc:
            raise DomainError(f"no successor for the final point {self.points[i]!r}") from exc


def iterate(space: MetricSpace, tmap: SelfMap, x0: Point, max_steps: int) -> OrbitTrace:
    """Apply ``tmap`` from ``x0`` until ``max_steps``, a fixed point, or the carrier edge."""
    if max_steps < 1:
        raise ParameterError("max_steps must be positive")
    if x0 not in space:
        raise DomainError(f"start point {x0!r} is not in the carrier")
    pol = space.policy
    points = [x0]
    deltas = []
    term = Termination(MAX_STEPS)
    for n in range(max_steps):
        x = points[-1]
        try:
            y = apply(tmap, x)
        except BoundaryError:
            term = Termination(BOUNDARY, n)
            break
        if y not in space:
            term = Termination(BOUNDARY, n)
            break
        d = space.distance(x, y)
        points.append(y)
        deltas.append(d)
        if pol.is_zero(d):
            term = Termination(FIXED_POINT, n)
            break
    return OrbitTrace(tuple(points), tuple(deltas), term, space, tmap)


def fixed_point_of(trace: OrbitTrace) -> tuple[Point, Scalar] | None:
    if trace.termination.kind != FIXED_POINT:
        return None
    k = trace.termination.index
    return trace.points[k], trace.deltas[k]


def capital_delta(space: MetricSpace, tmap: SelfMap, trace: OrbitTrace, p: int, q: int) -> Scalar:
    """d(T x_p, T x_q) / d(x_p, x_q), or 0 when the two points coincide."""
    xp, xq = trace.points[_idx(trace, p)], trace.points[_idx(trace, q)]
    delta = space.distance(xp, xq)
    if space.policy.is_zero(delta):
        return 0.0 if isinstance(delta, float) else Fraction(0)
    return ratio(space.distance(trace.successor(p), trace.successor(q)), delta)


def _idx(trace: OrbitTrace, i: int) -> int:
    if not 0 <= i < len(trace.points):
        raise DomainError(f"index {i} outside trace of length {len(trace.points)}")
    return i


def cauchy_estimate(trace: OrbitTrace, tail_window: int) -> Scalar:
    """Diameter of the last ``tail_window`` points."""
    if not 1 <= tail_window <= len(trace.points):
        raise ParameterError(f"tail_window must be in [1, {len(trace.points)}]")
    tail = trace.points[-tail_window:]
    d = trace.space.distance
    best = d(tail[0], tail[0])
    for i, x in enumerate(tail):
        for y in tail[i + 1:]:
            v = d(x, y)
            if v > best:
                best = v
    return best


# --------------------------------------------------------------------------
# sequential criterion


@dataclass(frozen=True)
class DiagnosticThresholds:
    """Finite-horizon stand-ins for "Delta_n -> 1" and "delta_n -> 0"."""

    eps_Delta: Scalar = Fraction(1, 100)
    eps_delta: Scalar = Fraction(1, 100)
    horizon: int = 5000

    def __post_init__(self):
        for name in ("eps_Delta", "eps_delta"):
            v = getattr(self, name)
            if isinstance(v, str):
                object.__setattr__(self, name, parse_rational(v))
        if not 0 < self.eps_Delta < 1:
            raise ParameterError("eps_Delta must lie in (0, 1)")
        if not self.eps_delta > 0:
            raise ParameterError("eps_delta must be positive")
        if self.horizon < 1:
            raise ParameterError("horizon must be positive")


@dataclass(frozen=True)
class SequentialWitness:
    p: int
    q: int
    delta: Scalar
    Delta: Scalar
    premise_ok: bool

    def to_dict(self) -> dict:
        return {
            "p": self.p,
            "q": self.q,
            "delta": format_scalar(self.delta),
            "Delta": format_scalar(self.Delta),
            "premise_ok": self.premise_ok,
        }


@dataclass(frozen=True)
class DiagnosticResult:
    """Witnesses against the sequential criterion, in (p, q) lexicographic order.

    ``found`` counts every qualifying pair; ``witnesses`` keeps at most the
    requested limit of them.
    """

    witnesses: tuple[SequentialWitness, ...]
    found: int
    horizon: int
    clamped: bool

    def __bool__(self) -> bool:
        return self.found > 0

    def __len__(self) -> int:
        return len(self.witnesses)

    def __iter__(self):
        return iter(self.witnesses)


def _line_float_coords(space: MetricSpace, pts: Sequence[Point]):
    if not isinstance(space, (LineSpace, LazyLineSpace)) or not isinstance(space.policy, Epsilon):
        return None
    coords = [space.coordinate(x) for x in pts]
    if not all(isinstance(c, float) for c in coords):
        return None
    return np.array(coords, dtype=np.float64)


def sequential_diagnostic(
    space: MetricSpace,
    tmap: SelfMap,
    trace: OrbitTrace,
    thresholds: DiagnosticThresholds = DiagnosticThresholds(),
    limit: int | None = 1000,
) -> DiagnosticResult:
    """Scan index pairs p < q <= horizon for evidence against the sequential criterion.

    A pair is returned when d(x_p, T x_p) <= d(x_p, x_q), Delta >= 1 - eps_Delta
    and delta >= eps_delta. An empty result means no evidence at this horizon.
    """
    if len(trace.points) < 2:
        raise ParameterError("trace needs at least two points")
    last = len(trace.points) - 2  # largest index whose successor is recorded
    H = min(thresholds.horizon, last)
    clamped = thresholds.horizon > last
    coords = _line_float_coords(space, trace.points[: H + 2])
    if coords is not None:
        found, wit = _scan_float_line(coords, space.policy.eps, thresholds, H, limit)
    else:
        found, wit = _scan_generic(space, trace, thresholds, H, limit)
    return DiagnosticResult(tuple(wit), found, H, clamped)


def _scan_generic(space, trace, th, H, limit):
    pol = space.policy
    d = space.distance
    pts = trace.points
    one_minus, eps_delta = 1 - th.eps_Delta, th.eps_delta
    if isinstance(pol, Epsilon):
        one_minus, eps_delta = float(one_minus), float(eps_delta)
    found = 0
    out = []
    for p in range(H + 1):
        xp, txp = pts[p], pts[p + 1]
        disp = d(xp, txp)
        for q in range(p + 1, H + 1):
            delta = d(xp, pts[q])
            if not pol.le(disp, delta) or not pol.le(eps_delta, delta):
                continue
            Delta = 0 if pol.is_zero(delta) else ratio(d(txp, pts[q + 1]), delta)
            if pol.le(one_minus, Delta):
                found += 1
                if limit is None or len(out) < limit:
                    out.append(SequentialWitness(p, q, delta, Delta, True))
    return found, out


def _scan_float_line(c, eps, th, H, limit):
    one_minus = float(1 - th.eps_Delta)
    eps_delta = float(th.eps_delta)
    found = 0
    out = []
    for p in range(H + 1):
        disp = abs(c[p] - c[p + 1])
        delta = np.abs(c[p] - c[p + 1 : H + 1])
        moved = np.abs(c[p + 1] - c[p + 2 : H + 2])
        zero = delta <= eps
        with np.errstate(divide="ignore", invalid="ignore"):
            Delta = np.where(zero, 0.0, moved / np.where(zero, 1.0, delta))
        ok = (disp <= delta + eps) & (eps_delta <= delta + eps) & (one_minus <= Delta + eps)
        hits = np.flatnonzero(ok)
        found += hits.size
        for h in hits:
            if limit is not None and len(out) >= limit:
                break
            out.append(SequentialWitness(p, p + 1 + int(h), float(delta[h]), float(Delta[h]), True))
    return found, out


def replay_witness(space: MetricSpace, tmap: SelfMap, trace: OrbitTrace, w: SequentialWitness) -> bool:
    """Recompute delta, Delta and the premise from scratch; True when all match exactly."""
    xp, xq = trace.points[w.p], trace.points[w.q]
    delta = space.distance(xp, xq)
    txp, txq = apply(tmap, xp), apply(tmap, xq)
    Delta = 0 if space.policy.is_zero(delta) else ratio(space.distance(txp, txq), delta)
    premise = space.policy.le(space.distance(xp, txp), delta)
    return delta == w.delta and Delta == w.Delta and premise == w.premise_ok


# --------------------------------------------------------------------------
# empirical psi


def _psi_table(space: MetricSpace, trace: OrbitTrace, horizon: int):
    H = min(horizon, len(trace.points) - 2)
    pts = trace.points
    d = space.distance
    rows = []
    for n in range(H + 1):
        lo = d(pts[n], pts[n + 1])
        for m in range(H + 1):
            hi = d(pts[n], pts[m])
            val = 0 if space.policy.is_zero(hi) else ratio(d(pts[n + 1], pts[m + 1]), hi)
            rows.append((lo, hi, val))
    return rows


def _psi_from_table(pol, rows, s):
    best = None
    for lo, hi, val in rows:
        if pol.le(lo, s) and pol.le(s, hi) and (best is None or val > best):
            best = val
    if best is None:
        return 0.0 if isinstance(s, float) else Fraction(0)
    return best


def extract_psi(space: MetricSpace, tmap: SelfMap, trace: OrbitTrace, s: Scalar, horizon: int) -> Scalar:
    """Sup of d(T x_n, T x_m)/d(x_n, x_m) over pairs with d(x_n, T x_n) <= s <= d(x_n, x_m).

    Pairs range over indices up to ``horizon`` (clamped to the trace). Returns
    zero when no pair qualifies.
    """
    if s < 0:
        raise ParameterError("s must be nonnegative")
    return _psi_from_table(space.policy, _psi_table(space, trace, horizon), s)


def psi_curve(space: MetricSpace, tmap: SelfMap, trace: OrbitTrace, grid: Iterable[Scalar], horizon: int) -> list:
    """``extract_psi`` on every grid value, sharing one pass over the pairs."""
    rows = _psi_table(space, trace, horizon)
    return [_psi_from_table(space.policy, rows, s) for s in grid]


# --------------------------------------------------------------------------
# export


def orbit_rows(trace: OrbitTrace) -> list[dict]:
    rows = []
    for n, x in enumerate(trace.points):
        c = trace.space.coordinate(x)
        rows.append(
            {
                "n": n,
                "point_id": str(x),
                "coordinate": "" if c is None else format_scalar(c),
                "delta_n": format_scalar(trace.deltas[n]) if n < len(trace.deltas) else "",
            }
        )
    return rows


def write_orbit_csv(trace: OrbitTrace, out: str | IO[str]) -> None:
    fields = ["n", "point_id", "coordinate", "delta_n"]
    if isinstance(out, str):
        with open(out, "w", newline="") as fh:
            write_orbit_csv(trace, fh)
        return
    writer = csv.DictWriter(out, fieldnames=fields, lineterminator="\n")
    writer.writeheader()
    writer.writerows(orbit_rows(trace))


def orbit_csv(trace: OrbitTrace) -> str:
    buf = io.StringIO()
    write_orbit_csv(trace, buf)
    return buf.getvalue()


def witnesses_to_json(witnesses: Iterable[SequentialWitness]) -> str:
    return json.dumps([w.to_dict() for w in witnesses], indent=2)
