"""Command-line front end.

Exit status: 0 success / satisfied, 1 violation or witness found, 2 usage or
input error.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .conditions import Exhaustive, Sampled, SuzukiHalfStrict, certify, parse_condition
from .enumerator import fixed_point_census, implication_audit, random_finite_metric
from .errors import FixlabError, ParameterError
from .gallery import DyadicProbeSpace, SuzukiSpace, build_gallery, dyadic_probe_space, probe_map, probe_target_index
from .metric import FiniteMetricSpace, SelfMap, identity_map, load_space_json, verify_metric_axioms
from .orbit import (
    DiagnosticThresholds,
    cauchy_estimate,
    fixed_point_of,
    iterate,
    sequential_diagnostic,
    write_orbit_csv,
)
from .scalar import EXACT, Epsilon, format_scalar, parse_rational

EXIT_OK, EXIT_FOUND, EXIT_USAGE = 0, 1, 2


def _dump(doc, out: str | None) -> None:
    text = json.dumps(doc, indent=2, sort_keys=True) + "\n"
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _policy(args):
    if args.backend == "float":
        if args.eps is None:
            raise ParameterError("--backend float requires --eps")
        return Epsilon(float(args.eps))
    if args.eps is not None:
        raise ParameterError("--eps only applies with --backend float")
    return EXACT


def _parse_map(text: str, space) -> SelfMap:
    if text == "identity":
        return identity_map(space)
    path = Path(text)
    raw = path.read_text() if path.exists() else text
    try:
        targets = json.loads(raw)
    except json.JSONDecodeError as exc:
        raise ParameterError(f"--map must be a JSON list of target indices: {exc}") from exc
    if isinstance(targets, dict):
        targets = targets.get("map")
    if not isinstance(targets, list) or not all(isinstance(t, int) for t in targets):
        raise ParameterError("--map must be a JSON list of target indices")
    return SelfMap.from_indices(space, targets)


def _load(args):
    """Resolve (space, map) from --space/--map or --gallery."""
    if getattr(args, "gallery", None):
        if getattr(args, "map", None):
            raise ParameterError("--map cannot be combined with --gallery")
        return build_gallery(args.gallery)
    if not getattr(args, "space", None):
        raise ParameterError("one of --space or --gallery is required")
    path = Path(args.space)
    try:
        doc = json.loads(path.read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise ParameterError(f"cannot read space file {path}: {exc}") from exc
    space = load_space_json(doc, _policy(args))
    spec = getattr(args, "map", None)
    if spec is None:
        if "map" not in doc:
            return space, None
        return space, SelfMap.from_indices(space, doc["map"])
    return space, _parse_map(spec, space)


def _point(space, text: str):
    if space.points is not None and text in space:
        return text
    value = parse_rational(text)
    if value in space:
        return value
    if float(value) in space:
        return float(value)
    raise ParameterError(f"{text!r} is not a point of {space.label or 'the space'}")


# --------------------------------------------------------------------------


def cmd_certify(args) -> int:
    space, tmap = _load(args)
    if tmap is None:
        raise ParameterError("certify needs a map (--map or a 'map' entry in the space file)")
    condition = parse_condition(args.condition)
    if args.scope == "sampled":
        if args.seed is None:
            raise ParameterError("--scope sampled requires --seed")
        scope = Sampled(args.seed, args.count)
    else:
        scope = Exhaustive()
    cert = certify(space, tmap, condition, scope)
    doc = cert.to_dict()
    doc["space"] = space.label
    _dump(doc, args.out)
    return EXIT_OK if cert.satisfied else EXIT_FOUND


def cmd_orbit(args) -> int:
    space, tmap = _load(args)
    if tmap is None:
        raise ParameterError("orbit needs a map")
    x0 = _point(space, getattr(args, "from"))
    trace = iterate(space, tmap, x0, args.steps)
    th = DiagnosticThresholds(parse_rational(args.eps_Delta), parse_rational(args.eps_delta), args.horizon)
    diag = sequential_diagnostic(space, tmap, trace, th, limit=args.limit) if len(trace) >= 2 else None
    fp = fixed_point_of(trace)
    doc = {
        "space": space.label,
        "map": tmap.label,
        "start": str(x0),
        "steps": len(trace) - 1,
        "termination": trace.termination.to_dict(),
        "last_point": str(trace.points[-1]),
        "fixed_point": None if fp is None else {"point": str(fp[0]), "residual": format_scalar(fp[1])},
        "cauchy_estimate": format_scalar(cauchy_estimate(trace, min(args.tail, len(trace)))),
        "diagnostic": None
        if diag is None
        else {
            "eps_Delta": format_scalar(th.eps_Delta),
            "eps_delta": format_scalar(th.eps_delta),
            "horizon": diag.horizon,
            "clamped": diag.clamped,
            "witnesses_found": diag.found,
        },
    }
    if args.csv:
        write_orbit_csv(trace, args.csv)
    if args.witnesses and diag is not None:
        Path(args.witnesses).write_text(json.dumps([w.to_dict() for w in diag], indent=2) + "\n")
    _dump(doc, args.out)
    return EXIT_FOUND if diag else EXIT_OK


def cmd_gallery(args) -> int:
    space, tmap = build_gallery(args.spec)
    doc = {"name": args.spec, "label": space.label, "map": tmap.label}
    if isinstance(space, SuzukiSpace):
        p = space.params
        doc.update(
            eta=format_scalar(p.eta),
            r=format_scalar(p.r),
            N=p.N,
            carrier={x: format_scalar(space.coordinate(x)) for x in space.points},
            domain=list(tmap.domain),
            axioms=verify_metric_axioms(space).to_dict(),
        )
    elif isinstance(space, DyadicProbeSpace):
        doc.update(
            B=space.B,
            anchor=format_scalar(space.anchor),
            u=[format_scalar(v) for v in space.u],
            map_on_u=[format_scalar(tmap(v)) for v in space.u if tmap.contains(v)],
            axioms=verify_metric_axioms(space, space.materialized()).to_dict(),
        )
    if "axioms" in doc and not doc["axioms"]["passed"]:
        _dump(doc, args.out)
        return EXIT_FOUND
    _dump(doc, args.out)
    return EXIT_OK


def cmd_census(args) -> int:
    if args.random is not None:
        if args.seed is None:
            raise ParameterError("--random requires --seed")
        space = random_finite_metric(args.random, args.seed)
    else:
        space, _ = _load(args)
    if not isinstance(space, FiniteMetricSpace):
        raise ParameterError("census needs a finite explicit space")
    if args.audit:
        report = implication_audit(space)
    else:
        if not args.condition:
            raise ParameterError("census needs --condition (or --audit)")
        report = fixed_point_census(space, parse_condition(args.condition))
    _dump(report.to_dict(), args.out)
    return EXIT_OK if report.passed else EXIT_FOUND


def cmd_probe(args) -> int:
    space = dyadic_probe_space(args.B)
    tmap = probe_map(space)
    rows = []
    ok = True
    for text in args.points:
        x = parse_rational(text)
        if x not in space:
            raise ParameterError(f"{text} is not a dyadic point of {space.label}")
        m = probe_target_index(space, x)
        if m is None:
            rows.append({"x": str(x), "image": None, "note": "needs a larger B"})
            continue
        tx = space.u[m]
        holds = space.rho(tx) < space.rho(x) / 7
        ok &= holds and tx != x
        rows.append(
            {
                "x": str(x),
                "image": str(tx),
                "image_index": m,
                "rho_x": format_scalar(space.rho(x)),
                "rho_image": format_scalar(space.rho(tx)),
                "rho_drop_ok": holds,
            }
        )
    cert = certify(space, tmap, SuzukiHalfStrict(), Sampled(args.seed, args.count))
    ok &= cert.satisfied
    _dump({"space": space.label, "points": rows, "certificate": cert.to_dict()}, args.out)
    return EXIT_OK if ok else EXIT_FOUND


# --------------------------------------------------------------------------


def _space_args(p: argparse.ArgumentParser) -> None:
    src = p.add_mutually_exclusive_group()
    src.add_argument("--space", help="JSON file with label, points, matrix (rational strings)")
    src.add_argument("--gallery", help='gallery construction, e.g. "suzuki(eta=3/5,N=40)"')
    p.add_argument("--map", help='JSON list of target indices, a file holding one, or "identity"')
    p.add_argument("--backend", choices=("exact", "float"), default="exact", help="scalar backend for --space")
    p.add_argument("--eps", help="comparison tolerance for --backend float")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="fixlab", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("certify", help="check a contractive condition for a map")
    _space_args(p)
    p.add_argument("--condition", required=True, help='e.g. "eta_nonstrict(3/5)", "contractive"')
    p.add_argument("--scope", choices=("exhaustive", "sampled"), default="exhaustive")
    p.add_argument("--seed", type=int)
    p.add_argument("--count", type=int, default=10_000)
    p.add_argument("--out")
    p.set_defaults(func=cmd_certify)

    p = sub.add_parser("orbit", help="Picard iteration with sequential diagnostics")
    _space_args(p)
    p.add_argument("--from", required=True, help="start point (identifier or rational)")
    p.add_argument("--steps", type=int, default=100)
    p.add_argument("--eps-Delta", dest="eps_Delta", default="1/100")
    p.add_argument("--eps-delta", dest="eps_delta", default="1/100")
    p.add_argument("--horizon", type=int, default=5000)
    p.add_argument("--limit", type=int, default=1000, help="max witnesses kept")
    p.add_argument("--tail", type=int, default=10, help="tail window for the Cauchy estimate")
    p.add_argument("--csv", help="write the orbit as CSV")
    p.add_argument("--witnesses", help="write witnesses as a JSON array")
    p.add_argument("--out")
    p.set_defaults(func=cmd_orbit)

    p = sub.add_parser("gallery", help="build and describe a gallery construction")
    p.add_argument("spec")
    p.add_argument("--out")
    p.set_defaults(func=cmd_gallery)

    p = sub.add_parser("census", help="enumerate all self-maps of a small space")
    _space_args(p)
    p.add_argument("--random", type=int, metavar="N", help="use a random metric on N points")
    p.add_argument("--seed", type=int)
    p.add_argument("--condition")
    p.add_argument("--audit", action="store_true", help="run the implication-chain audit instead")
    p.add_argument("--out")
    p.set_defaults(func=cmd_census)

    p = sub.add_parser("probe", help="evaluate the fixed-point-free map on the incomplete dyadic space")
    p.add_argument("--B", type=int, default=64)
    p.add_argument("--points", nargs="*", default=["1", "1/4"])
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--count", type=int, default=10_000)
    p.add_argument("--out")
    p.set_defaults(func=cmd_probe)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (FixlabError, OSError) as exc:
        print(f"fixlab: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
