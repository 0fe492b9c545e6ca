"""Certifiers for contractive conditions on a self-map of a metric space.

Each condition is an implication ``premise(x, y) ==> conclusion(x, y)``
quantified over ordered pairs of the map's certification domain. The strict or
non-strict form of every inequality is part of the condition's identity and is
decided through the space's comparison policy.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from random import Random
from typing import Callable, ClassVar, Iterable, NamedTuple, Sequence

from .errors import DegenerateInputError, DomainError, ParameterError, TestFunctionError
from .metric import MetricSpace, Point, SelfMap, apply
from .scalar import Policy, Scalar, format_scalar, parse_rational, ratio

HALF = Fraction(1, 2)


# --------------------------------------------------------------------------
# theta


def _below_golden(r: Scalar) -> bool:
    # r <= (sqrt5 - 1)/2  <=>  r^2 + r <= 1   (r >= 0)
    return r * r + r <= 1


def _below_inv_sqrt2(r: Scalar) -> bool:
    # r <= 1/sqrt2  <=>  2 r^2 <= 1
    return 2 * r * r <= 1


def theta_branch_values(r: Scalar) -> tuple[Scalar, Scalar, Scalar]:
    """All three piecewise formulas evaluated at ``r`` (for breakpoint checks)."""
    one = 1.0 if isinstance(r, float) else Fraction(1)
    return one, (1 - r) / (r * r) if r else one, one / (1 + r)


def theta(r: Scalar) -> Scalar:
    """Suzuki's threshold function on ``[0, 1)``.

    Exact for rational input: the irrational breakpoints are decided by the
    polynomial forms ``r**2 + r <= 1`` and ``2 r**2 <= 1``.
    """
    if isinstance(r, str):
        r = parse_rational(r)
    if not 0 <= r < 1:
        raise DomainError(f"theta is defined on [0, 1), got {r!r}")
    if _below_golden(r):
        return 1.0 if isinstance(r, float) else Fraction(1)
    if _below_inv_sqrt2(r):
        return (1 - r) / (r * r)
    return 1 / (1 + r) if isinstance(r, float) else Fraction(1) / (1 + r)


# --------------------------------------------------------------------------
# test functions


@dataclass(frozen=True, eq=False)
class TestFunction:
    """A real function used as a parameter of a condition.

    ``declared_class`` is one of ``"boyd_wong_phi"`` (needs phi(s) < s for
    s > 0), ``"psi"`` (range in [0, 1]) or ``"empirical"`` (nonnegative). The
    class-defining limit properties cannot be checked; evaluation only
    enforces the codomain.
    """

    __test__ = False

    evaluator: Callable[[Scalar], Scalar]
    declared_class: str = "empirical"
    label: str = ""

    def __post_init__(self):
        if self.declared_class not in ("boyd_wong_phi", "psi", "empirical"):
            raise ParameterError(f"unknown test-function class {self.declared_class!r}")

    def in_codomain(self, s: Scalar, value: Scalar) -> bool:
        if value < 0:
            return False
        if self.declared_class == "psi":
            return value <= 1
        if self.declared_class == "boyd_wong_phi":
            return s == 0 or value < s
        return True

    def __call__(self, s: Scalar) -> Scalar:
        value = self.evaluator(s)
        if not self.in_codomain(s, value):
            raise TestFunctionError(f"{self.label or self.declared_class}({s!r}) = {value!r} leaves its codomain")
        return value

    def spot_check(self, grid: Iterable[Scalar]) -> list[Scalar]:
        """Grid points where the codomain requirement fails."""
        return [s for s in grid if not self.in_codomain(s, self.evaluator(s))]


def falsify_psi(psi: TestFunction, samples: Iterable[Scalar], near_one: Scalar, away_from_zero: Scalar) -> list:
    """Finite evidence against psi-class membership.

    Returns the samples ``s >= away_from_zero`` with ``psi(s) >= 1 - near_one``.
    A sequence drawn from this list with ``psi(s) -> 1`` would refute the class
    property; an empty list proves nothing.
    """
    return [s for s in samples if s >= away_from_zero and psi.evaluator(s) >= 1 - near_one]


# --------------------------------------------------------------------------
# condition kinds


class PairCheck(NamedTuple):
    premise: bool
    premise_lhs: Scalar | None
    premise_rhs: Scalar | None
    holds: bool
    conclusion_lhs: Scalar
    conclusion_rhs: Scalar

    @property
    def violated(self) -> bool:
        return self.premise and not self.holds


def _rational_param(value, name: str):
    if isinstance(value, str):
        return parse_rational(value)
    if value is None:
        raise ParameterError(f"{name} is required")
    return value


class Condition:
    """Base for the fixed menu of conditions.

    Subclasses implement :meth:`check` given the three distances that every
    condition depends on.
    """

    name: ClassVar[str] = ""

    def params(self) -> dict:
        return {}

    def check(self, pol: Policy, same: bool, dxy: Scalar, dxtx: Scalar, dtxty: Scalar) -> PairCheck:
        raise NotImplementedError

    def describe(self) -> str:
        p = self.params()
        if not p:
            return self.name
        return f"{self.name}({','.join(str(v) for v in p.values())})"


def _guarded(pol, coef, strict_premise, dxy, dxtx, dtxty, strict_conclusion, rhs=None):
    lhs = coef * dxtx
    premise = pol.lt(lhs, dxy) if strict_premise else pol.le(lhs, dxy)
    rhs = dxy if rhs is None else rhs
    holds = pol.lt(dtxty, rhs) if strict_conclusion else pol.le(dtxty, rhs)
    return PairCheck(premise, lhs, dxy, holds, dtxty, rhs)


@dataclass(frozen=True)
class BanachContraction(Condition):
    """d(Tx, Ty) <= r d(x, y) for all x, y."""

    r: Scalar
    name: ClassVar[str] = "banach"

    def __post_init__(self):
        r = _rational_param(self.r, "r")
        object.__setattr__(self, "r", r)
        if not 0 <= r < 1:
            raise ParameterError(f"contraction factor must lie in [0, 1), got {r!r}")

    def params(self):
        return {"r": format_scalar(self.r)}

    def check(self, pol, same, dxy, dxtx, dtxty):
        rhs = self.r * dxy
        return PairCheck(True, None, None, pol.le(dtxty, rhs), dtxty, rhs)


@dataclass(frozen=True)
class BoydWong(Condition):
    """d(Tx, Ty) <= phi(d(x, y)); phi's right-continuity is taken on trust."""

    phi: TestFunction
    name: ClassVar[str] = "boyd_wong"

    def __post_init__(self):
        if self.phi.declared_class != "boyd_wong_phi":
            raise ParameterError("BoydWong needs a test function declared as boyd_wong_phi")

    def params(self):
        return {"phi": self.phi.label}

    def check(self, pol, same, dxy, dxtx, dtxty):
        rhs = self.phi(dxy)
        return PairCheck(True, None, None, pol.le(dtxty, rhs), dtxty, rhs)


@dataclass(frozen=True)
class SuzukiTheta(Condition):
    """theta(r) d(x, Tx) <= d(x, y)  ==>  d(Tx, Ty) <= r d(x, y)."""

    r: Scalar
    name: ClassVar[str] = "suzuki_theta"

    def __post_init__(self):
        r = _rational_param(self.r, "r")
        object.__setattr__(self, "r", r)
        if not 0 <= r < 1:
            raise ParameterError(f"r must lie in [0, 1), got {r!r}")

    def params(self):
        return {"r": format_scalar(self.r)}

    def check(self, pol, same, dxy, dxtx, dtxty):
        return _guarded(pol, theta(self.r), False, dxy, dxtx, dtxty, False, rhs=self.r * dxy)


@dataclass(frozen=True)
class Contractive(Condition):
    """d(Tx, Ty) < d(x, y) whenever x != y."""

    name: ClassVar[str] = "contractive"

    def check(self, pol, same, dxy, dxtx, dtxty):
        return PairCheck(not same, 0, dxy, pol.lt(dtxty, dxy), dtxty, dxy)


@dataclass(frozen=True)
class SuzukiHalfStrict(Condition):
    """(1/2) d(x, Tx) < d(x, y)  ==>  d(Tx, Ty) < d(x, y)."""

    name: ClassVar[str] = "suzuki_half_strict"

    def check(self, pol, same, dxy, dxtx, dtxty):
        return _guarded(pol, HALF, True, dxy, dxtx, dtxty, True)


@dataclass(frozen=True)
class DisplacementGuarded(Condition):
    """x != y and d(x, Tx) <= d(x, y)  ==>  d(Tx, Ty) < d(x, y)."""

    name: ClassVar[str] = "displacement_guarded"

    def check(self, pol, same, dxy, dxtx, dtxty):
        c = _guarded(pol, 1, False, dxy, dxtx, dtxty, True)
        return c._replace(premise=c.premise and not same)


@dataclass(frozen=True)
class HalfNonstrict(Condition):
    """(1/2) d(x, Tx) <= d(x, y)  ==>  d(Tx, Ty) <= d(x, y). Gives no uniqueness."""

    name: ClassVar[str] = "half_nonstrict"

    def check(self, pol, same, dxy, dxtx, dtxty):
        return _guarded(pol, HALF, False, dxy, dxtx, dtxty, False)


@dataclass(frozen=True)
class EtaNonstrict(Condition):
    """eta d(x, Tx) <= d(x, y)  ==>  d(Tx, Ty) < d(x, y), for eta > 1/2."""

    eta: Scalar
    name: ClassVar[str] = "eta_nonstrict"

    def __post_init__(self):
        eta = _rational_param(self.eta, "eta")
        object.__setattr__(self, "eta", eta)
        if not eta > HALF:
            raise ParameterError(f"eta must exceed 1/2, got {eta!r}")

    def params(self):
        return {"eta": format_scalar(self.eta)}

    def check(self, pol, same, dxy, dxtx, dtxty):
        return _guarded(pol, self.eta, False, dxy, dxtx, dtxty, True)


@dataclass(frozen=True)
class EtaStrict(Condition):
    """eta d(x, Tx) < d(x, y)  ==>  d(Tx, Ty) < d(x, y), for eta in (0, 1/2]."""

    eta: Scalar
    name: ClassVar[str] = "eta_strict"

    def __post_init__(self):
        eta = _rational_param(self.eta, "eta")
        object.__setattr__(self, "eta", eta)
        if not 0 < eta <= HALF:
            raise ParameterError(f"eta must lie in (0, 1/2], got {eta!r}")

    def params(self):
        return {"eta": format_scalar(self.eta)}

    def check(self, pol, same, dxy, dxtx, dtxty):
        return _guarded(pol, self.eta, True, dxy, dxtx, dtxty, True)


@dataclass(frozen=True)
class GlobalPsiHalf(Condition):
    """(1/2) d(x, Tx) < d(x, y)  ==>  d(Tx, Ty) < psi(d(x, y)) d(x, y)."""

    psi: TestFunction
    name: ClassVar[str] = "global_psi_half"

    def __post_init__(self):
        if self.psi.declared_class != "psi":
            raise ParameterError("GlobalPsiHalf needs a test function declared as psi")

    def params(self):
        return {"psi": self.psi.label}

    def check(self, pol, same, dxy, dxtx, dtxty):
        lhs = HALF * dxtx
        premise = pol.lt(lhs, dxy)
        if not premise:
            return PairCheck(False, lhs, dxy, True, dtxty, None)
        rhs = self.psi(dxy) * dxy
        return PairCheck(True, lhs, dxy, pol.lt(dtxty, rhs), dtxty, rhs)


_CHAIN = (BanachContraction, Contractive, SuzukiHalfStrict, DisplacementGuarded)


def implication_expected(a: Condition, b: Condition) -> bool:
    """Whether ``a`` satisfied is known to force ``b`` satisfied on every space.

    Encodes banach(r) => contractive => suzuki_half_strict => displacement_guarded
    (with transitivity), eta_strict(eta) => eta_strict(eta') for eta <= eta',
    and reflexivity.
    """
    if a == b:
        return True
    ta, tb = type(a), type(b)
    if ta in _CHAIN and tb in _CHAIN:
        return _CHAIN.index(ta) < _CHAIN.index(tb)
    if ta is EtaStrict and tb is EtaStrict:
        return a.eta <= b.eta
    return False


# --------------------------------------------------------------------------
# certificates


@dataclass(frozen=True)
class Exhaustive:
    kind: ClassVar[str] = "exhaustive"


@dataclass(frozen=True)
class Sampled:
    seed: int
    count: int
    kind: ClassVar[str] = "sampled"

    def __post_init__(self):
        if self.count < 1:
            raise ParameterError("sampled scope needs count >= 1")


@dataclass(frozen=True)
class PairWitness:
    x: Point
    y: Point
    premise_lhs: Scalar | None
    premise_rhs: Scalar | None
    conclusion_lhs: Scalar
    conclusion_rhs: Scalar

    def to_dict(self) -> dict:
        return {
            "x": str(self.x),
            "y": str(self.y),
            "premise_lhs": format_scalar(self.premise_lhs),
            "premise_rhs": format_scalar(self.premise_rhs),
            "conclusion_lhs": format_scalar(self.conclusion_lhs),
            "conclusion_rhs": format_scalar(self.conclusion_rhs),
        }


@dataclass(frozen=True)
class Certificate:
    condition: Condition
    verdict: str
    scope: str
    pairs_checked: int
    seed: int | None = None
    witness: PairWitness | None = None
    violating_pairs: int = 0

    @property
    def satisfied(self) -> bool:
        return self.verdict == "satisfied"

    def to_dict(self) -> dict:
        return {
            "condition": self.condition.name,
            "params": self.condition.params(),
            "verdict": self.verdict,
            "scope": self.scope,
            "seed": self.seed,
            "pairs_checked": self.pairs_checked,
            "violating_pairs": self.violating_pairs,
            "witness": None if self.witness is None else self.witness.to_dict(),
        }


def _pairs_for(tmap: SelfMap, scope, pairs):
    if pairs is not None:
        pairs = list(pairs)
        return pairs, "pairs", None
    if isinstance(scope, Sampled):
        rng = Random(scope.seed)
        drawn = [(tmap.sample(rng), tmap.sample(rng)) for _ in range(scope.count)]
        return drawn, "sampled", scope.seed
    if tmap.domain is None:
        raise ParameterError(f"map {tmap.label!r} has no materialized domain; use a sampled scope")
    dom = tmap.domain
    return [(x, y) for x in dom for y in dom], "exhaustive", None


def certify_many(
    space: MetricSpace,
    tmap: SelfMap,
    conditions: Sequence[Condition],
    scope: Exhaustive | Sampled = Exhaustive(),
    *,
    pairs: Iterable[tuple[Point, Point]] | None = None,
    stop_at_first: bool = False,
) -> list[Certificate]:
    """Certify several conditions over one shared set of pairs.

    Distances are computed once per pair. With ``stop_at_first`` a condition
    stops being evaluated after its first violation (its ``pairs_checked``
    then counts only the pairs it saw).
    """
    plist, scope_kind, seed = _pairs_for(tmap, scope, pairs)
    pol = space.policy
    image: dict = {}
    disp: dict = {}

    def img(x):
        if x not in image:
            tx = apply(tmap, x)
            if tx not in space:
                raise DomainError(f"T({x!r}) = {tx!r} leaves the carrier")
            image[x] = tx
            disp[x] = space.distance(x, tx)
        return image[x]

    k = len(conditions)
    checked = [0] * k
    bad = [0] * k
    first: list[PairWitness | None] = [None] * k
    live = list(range(k))
    for x, y in plist:
        if not live:
            break
        tx, ty = img(x), img(y)
        dxy = space.distance(x, y)
        dtxty = space.distance(tx, ty)
        same = x == y
        dxtx = disp[x]
        still = []
        for i in live:
            c = conditions[i].check(pol, same, dxy, dxtx, dtxty)
            checked[i] += 1
            if c.violated:
                bad[i] += 1
                if first[i] is None:
                    first[i] = PairWitness(x, y, c.premise_lhs, c.premise_rhs, c.conclusion_lhs, c.conclusion_rhs)
                if stop_at_first:
                    continue
            still.append(i)
        live = still

    return [
        Certificate(
            condition=conditions[i],
            verdict="violated" if bad[i] else "satisfied",
            scope=scope_kind,
            pairs_checked=checked[i],
            seed=seed,
            witness=first[i],
            violating_pairs=bad[i],
        )
        for i in range(k)
    ]


def certify(
    space: MetricSpace,
    tmap: SelfMap,
    condition: Condition,
    scope: Exhaustive | Sampled = Exhaustive(),
    *,
    pairs: Iterable[tuple[Point, Point]] | None = None,
) -> Certificate:
    """Check ``condition`` for ``tmap`` over all (or sampled, or given) ordered pairs.

    The witness of a violated certificate is the first violating pair in scan
    order; replaying it with ``pairs=[(w.x, w.y)]`` reproduces the violation.
    """
    return certify_many(space, tmap, [condition], scope, pairs=pairs)[0]


def replay_witness(space: MetricSpace, tmap: SelfMap, cert: Certificate) -> Certificate:
    if cert.witness is None:
        raise ParameterError("certificate carries no witness")
    return certify(space, tmap, cert.condition, pairs=[(cert.witness.x, cert.witness.y)])


def minimal_lipschitz(space: MetricSpace, tmap: SelfMap) -> Scalar:
    """Largest d(Tx, Ty)/d(x, y) over distinct domain pairs: the best Banach constant."""
    dom = tmap.domain
    if dom is None or len(dom) < 2:
        raise DegenerateInputError("need a materialized domain with at least two points")
    image = {x: apply(tmap, x) for x in dom}
    best = None
    for i, x in enumerate(dom):
        for y in dom[i + 1:]:
            dxy = space.distance(x, y)
            if dxy == 0:
                continue
            q = ratio(space.distance(image[x], image[y]), dxy)
            if best is None or q > best:
                best = q
    if best is None:
        raise DegenerateInputError("every pair of domain points is at distance zero")
    return best


# --------------------------------------------------------------------------
# text form used by the CLI: "eta_nonstrict(3/5)", "banach(1/2)", "contractive"

_BY_NAME = {
    cls.name: cls
    for cls in (
        BanachContraction,
        SuzukiTheta,
        Contractive,
        SuzukiHalfStrict,
        DisplacementGuarded,
        HalfNonstrict,
        EtaNonstrict,
        EtaStrict,
    )
}


def parse_condition(text: str) -> Condition:
    """Parse a condition spec. Test-function kinds are not expressible as text."""
    text = text.strip()
    name, _, rest = text.partition("(")
    name = name.strip().lower().replace("-", "_")
    cls = _BY_NAME.get(name)
    if cls is None:
        raise ParameterError(f"unknown condition {name!r}; choose from {sorted(_BY_NAME)}")
    args = []
    if rest:
        if not rest.endswith(")"):
            raise ParameterError(f"malformed condition {text!r}")
        inner = rest[:-1].strip()
        if inner:
            args = [parse_rational(a.split("=")[-1]) for a in inner.split(",")]
    try:
        return cls(*args)
    except TypeError as exc:
        raise ParameterError(f"wrong parameters for {name}: {exc}") from exc

