"""Exact reconstructions of the two counterexample spaces, plus small demo maps.

* :func:`suzuki_space` - a complete space with a fixed-point-free map that
  satisfies the eta-guarded contractive condition for a given eta > 1/2.
* :func:`dyadic_probe_space` / :func:`probe_map` - dyadic rationals in [0, 1]
  with the limit 1/3 missing, and the fixed-point-free map built from the
  distance-to-the-hole function rho.
* :func:`divergent_contractive_map` and :func:`halving_map` - rule maps on the
  line used to contrast divergent and convergent orbits.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational
from random import Random

from .errors import BoundaryError, ParameterError
from .metric import LazyLineSpace, LineSpace, SelfMap
from .scalar import EXACT, Epsilon, parse_rational

HALF = Fraction(1, 2)
INV_SQRT2_PROXY = Fraction(7072, 10000)


# --------------------------------------------------------------------------
# complete space with no fixed point


@dataclass(frozen=True)
class SuzukiSpaceParams:
    eta: Fraction
    r: Fraction
    N: int

    def __post_init__(self):
        eta, r = Fraction(self.eta), Fraction(self.r)
        object.__setattr__(self, "eta", eta)
        object.__setattr__(self, "r", r)
        if not eta > HALF:
            raise ParameterError(f"eta must exceed 1/2, got {eta}")
        if not r < 1:
            raise ParameterError(f"r must be below 1, got {r}")
        if not r * r > HALF:
            raise ParameterError(f"r must exceed 1/sqrt2 (r^2 > 1/2), got {r}")
        if not r > (1 - eta) / eta:
            raise ParameterError(f"need 1/(1+r) < eta; r={r} is too small for eta={eta}")
        if self.N < 2:
            raise ParameterError("N must be at least 2")

    def u(self, n: int) -> Fraction:
        return (1 - self.r) * (-self.r) ** n


def choose_r(eta: Fraction) -> Fraction:
    """Smallest multiple of 1/64 strictly inside (max((1-eta)/eta, 0.7072), 1).

    When eta is so close to 1/2 that no such grid point exists, the grid is
    halved until one does.
    """
    eta = Fraction(eta)
    if not eta > HALF:
        raise ParameterError(f"eta must exceed 1/2, got {eta}")
    lower = max((1 - eta) / eta, INV_SQRT2_PROXY)
    den = 64
    while True:
        k = math.floor(lower * den) + 1
        if Fraction(k, den) < 1:
            return Fraction(k, den)
        den *= 2


class SuzukiSpace(LineSpace):
    """{0, 1} together with u_n = (1-r)(-r)^n for n = 0..N, embedded in the line."""

    def __init__(self, params: SuzukiSpaceParams):
        coords = {"0": Fraction(0), "1": Fraction(1)}
        for n in range(params.N + 1):
            coords[f"u{n}"] = params.u(n)
        super().__init__(coords, label=f"suzuki(eta={params.eta},r={params.r},N={params.N})")
        self.params = params

    def u(self, n: int) -> str:
        if not 0 <= n <= self.params.N:
            raise ParameterError(f"u{n} is not materialized (N={self.params.N})")
        return f"u{n}"


def suzuki_space(eta, N: int, r=None) -> tuple[SuzukiSpace, SelfMap]:
    """Truncation of the space and map; T0 = 1, T1 = u0, T u_n = u_{n+1}.

    The map's domain stops at u_{N-1}, so the edge point u_N is carrier-only.
    ``r`` defaults to :func:`choose_r`; any admissible rational may be passed.
    """
    eta = parse_rational(eta)
    if not eta > HALF:
        raise ParameterError(f"eta must exceed 1/2, got {eta}")
    r = choose_r(eta) if r is None else parse_rational(r)
    params = SuzukiSpaceParams(eta, r, int(N))
    space = SuzukiSpace(params)
    table = {"0": "1", "1": "u0"}
    for n in range(params.N):
        table[f"u{n}"] = f"u{n + 1}"
    return space, SelfMap.from_table(table, label="suzuki_map")


# --------------------------------------------------------------------------
# incomplete dyadic space


def _is_dyadic(x, B: int) -> bool:
    if isinstance(x, bool) or not isinstance(x, Rational):
        return False
    den = Fraction(x).denominator
    return 0 <= x <= 1 and den & (den - 1) == 0 and den.bit_length() - 1 <= B


class DyadicProbeSpace(LazyLineSpace):
    """Dyadic rationals in [0, 1] with denominator at most 2**B.

    The Cauchy sequence u_n = (1 - 4**-(n+1))/3 climbs to 1/3, which is not
    dyadic, so the space is incomplete along it. ``rho(x) = |x - 1/3|`` is the
    limit of d(x, u_n).
    """

    anchor = Fraction(1, 3)

    def __init__(self, B: int):
        if B < 4:
            raise ParameterError("B must be at least 4")
        self.B = B
        u = []
        n = 0
        while 4 ** (n + 1) <= 2**B:
            u.append((1 - Fraction(1, 4 ** (n + 1))) / 3)
            n += 1
        self.u = tuple(u)
        self._u_index = {v: i for i, v in enumerate(self.u)}
        super().__init__(lambda x: _is_dyadic(x, B), label=f"dyadic_probe(B={B})", sampler=self._sample)

    def rho(self, x) -> Fraction:
        return abs(Fraction(x) - self.anchor)

    def u_index(self, x) -> int | None:
        return self._u_index.get(x)

    def _sample(self, rng: Random) -> Fraction:
        # a quarter of the draws land on the u-sequence, where the map is most delicate
        if rng.random() < 0.25:
            return self.u[rng.randrange(len(self.u))]
        b = rng.randint(0, self.B)
        return Fraction(rng.randint(0, 2**b), 2**b)

    def materialized(self) -> list[Fraction]:
        """A finite slice of the carrier: the u-sequence plus the dyadics with denominator <= 16."""
        pts = set(self.u)
        pts.update(Fraction(k, 16) for k in range(17))
        return sorted(pts)


def dyadic_probe_space(B: int = 64) -> DyadicProbeSpace:
    return DyadicProbeSpace(B)


def probe_target_index(space: DyadicProbeSpace, x) -> int | None:
    """Least m with rho(u_m) < rho(x)/7 (and m > k when x = u_k); None past the truncation."""
    bound = space.rho(x) / 7
    k = space.u_index(x)
    for m in range(0 if k is None else k + 1, len(space.u)):
        if space.rho(space.u[m]) < bound:
            return m
    return None


def probe_map(space: DyadicProbeSpace) -> SelfMap:
    """T x = u_m for the least admissible m; rho(Tx) < rho(x)/7, so T x != x."""

    def in_domain(x) -> bool:
        return x in space and probe_target_index(space, x) is not None

    def rule(x):
        m = probe_target_index(space, x)
        if m is None:
            raise BoundaryError(f"T({x}) needs u_m beyond the materialized sequence; raise B")
        return space.u[m]

    def sampler(rng: Random):
        while True:
            x = space.sample(rng)
            if in_domain(x):
                return x

    return SelfMap(rule=rule, in_domain=in_domain, sampler=sampler, label="probe_map")


# --------------------------------------------------------------------------
# rule maps on the line


def _line_backend(backend: str, eps: float):
    if backend == "exact":
        return EXACT
    if backend == "float":
        return Epsilon(eps)
    raise ParameterError(f"backend must be 'exact' or 'float', got {backend!r}")


def _is_number(x, exact: bool) -> bool:
    if isinstance(x, bool):
        return False
    if exact:
        return isinstance(x, Rational)
    return isinstance(x, float) and math.isfinite(x)


def divergent_contractive_map(backend: str = "exact", eps: float = 1e-12) -> tuple[LazyLineSpace, SelfMap]:
    """x -> x + 1/x on [1, inf): |Tx - Ty| = |x - y|(1 - 1/(xy)), yet orbits run off to infinity.

    The exact backend keeps orbits in rationals, whose size doubles each step;
    use ``backend="float"`` for long orbits.
    """
    pol = _line_backend(backend, eps)
    exact = backend == "exact"

    def member(x) -> bool:
        return _is_number(x, exact) and x >= 1

    def sample(rng: Random):
        if exact:
            scale = 2**20
            return Fraction(rng.randint(scale, 100 * scale), scale)
        return rng.uniform(1.0, 100.0)

    space = LazyLineSpace(member, label=f"divergent({backend})", policy=pol, sampler=sample)
    one = Fraction(1) if exact else 1.0
    tmap = SelfMap(rule=lambda x: x + one / x, in_domain=member, sampler=sample, label="x+1/x")
    return space, tmap


def halving_map(backend: str = "exact", eps: float = 1e-12) -> tuple[LazyLineSpace, SelfMap]:
    """x -> x/2 on [0, 1]; a Banach contraction with factor 1/2 and fixed point 0."""
    pol = _line_backend(backend, eps)
    exact = backend == "exact"

    def member(x) -> bool:
        return _is_number(x, exact) and 0 <= x <= 1

    def sample(rng: Random):
        if exact:
            return Fraction(rng.randint(0, 2**20), 2**20)
        return rng.random()

    space = LazyLineSpace(member, label=f"halving({backend})", policy=pol, sampler=sample)
    half = HALF if exact else 0.5
    tmap = SelfMap(rule=lambda x: x * half, in_domain=member, sampler=sample, label="x/2")
    return space, tmap


# --------------------------------------------------------------------------
# lookup by name, e.g. "suzuki(eta=3/5,N=40)"

_SPEC = re.compile(r"^\s*([a-z_]+)\s*(?:\((.*)\))?\s*$")


def parse_gallery_spec(text: str) -> tuple[str, dict[str, str]]:
    m = _SPEC.match(text)
    if not m:
        raise ParameterError(f"malformed gallery spec {text!r}")
    name, body = m.group(1), m.group(2) or ""
    kwargs = {}
    for part in filter(None, (p.strip() for p in body.split(","))):
        key, sep, value = part.partition("=")
        if not sep:
            raise ParameterError(f"gallery parameters must be key=value, got {part!r}")
        kwargs[key.strip()] = value.strip()
    return name, kwargs


_ALLOWED = {
    "suzuki": {"eta", "N", "r"},
    "dyadic_probe": {"B"},
    "divergent": {"backend", "eps"},
    "halving": {"backend", "eps"},
}


def build_gallery(text: str):
    """Build ``(space, map)`` from a gallery spec string."""
    name, kw = parse_gallery_spec(text)
    if name not in _ALLOWED:
        raise ParameterError(f"unknown gallery {name!r}; choose from {sorted(_ALLOWED)}")
    stray = set(kw) - _ALLOWED[name]
    if stray:
        raise ParameterError(f"unknown parameters for {name}: {sorted(stray)}")
    try:
        if name == "suzuki":
            if "eta" not in kw:
                raise ParameterError("suzuki needs eta=...")
            return suzuki_space(kw["eta"], int(kw.get("N", "40")), kw.get("r"))
        if name == "dyadic_probe":
            space = dyadic_probe_space(int(kw.get("B", "64")))
            return space, probe_map(space)
        build = divergent_contractive_map if name == "divergent" else halving_map
        return build(kw.get("backend", "exact"), float(kw.get("eps", "1e-12")))
    except ParameterError:
        raise
    except ValueError as exc:
        raise ParameterError(f"bad gallery parameter in {text!r}: {exc}") from exc


GALLERY_NAMES = frozenset(_ALLOWED)
