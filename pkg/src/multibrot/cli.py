"""Command-line front end: ``multibrot <command> ...``.

Exit status: 0 success, 1 usage error, 2 undecided at the current bounds,
3 numerical validation failure.
"""

from __future__ import annotations

import argparse
import os
import sys
from fractions import Fraction
from pathlib import Path
from typing import Optional

from .circle import classify, format_angle, parse_angle
from .errors import BoundExceeded, TraceStalled
from .lamination import Lamination, build
from .queries import (
    SeparationWitness,
    Undecided,
    approximating_pairs,
    branch_point,
    misiurewicz_subwakes,
    same_comb_class,
    separate,
)
from .symbolic import angled_internal_address, internal_address, kneading_sequence

CACHE_ENV = "MULTIBROT_CACHE"

EXIT_OK, EXIT_USAGE, EXIT_UNDECIDED, EXIT_NUMERIC = 0, 1, 2, 3


class UsageError(Exception):
    pass


class Undecidable(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


class Output:
    """Collects records; prints text lines or ``key=value`` records."""

    def __init__(self, fmt: str, stream):
        self.fmt = fmt
        self.stream = stream

    def emit(self, text: str, **record) -> None:
        if self.fmt == "machine":
            line = " ".join(f"{k}={_field(v)}" for k, v in record.items()) if record else text
        else:
            line = text
        print(line, file=self.stream)


def _field(v) -> str:
    if isinstance(v, Fraction):
        return format_angle(v)
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, (list, tuple)):
        return ",".join(_field(x) for x in v)
    return str(v).replace(" ", "_")


def _angle(text: str) -> Fraction:
    try:
        return parse_angle(text)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def _cache_file(args) -> Optional[Path]:
    root = args.cache if args.cache is not None else os.environ.get(CACHE_ENV)
    if not root:
        return None
    name = f"mblam-d{args.degree}-n{args.max_period}-l{args.max_preperiod}"
    if args.max_preperiod and args.misiu_period != args.max_period:
        name += f"-p{args.misiu_period}"
    return Path(root) / (name + ".txt")


def _expected_header(args) -> str:
    lam = Lamination(args.degree, args.max_period, args.max_preperiod,
                     args.misiu_period if args.max_preperiod else None)
    return lam.header()


def _lamination(args) -> Lamination:
    path = _cache_file(args)
    if path is not None and path.exists():
        text = path.read_text(encoding="utf-8")
        if text.split("\n", 1)[0] == _expected_header(args):
            return Lamination.loads(text)
    lam = build(args.degree, args.max_period, args.max_preperiod, args.misiu_period)
    if path is not None:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(lam.dumps(), encoding="utf-8")
    return lam


# -- commands ----------------------------------------------------------------

def cmd_angle_info(args, out: Output) -> int:
    theta = _angle(args.theta)
    d = args.degree
    cls = classify(theta, d)
    out.emit(f"angle {format_angle(theta)}", angle=theta)
    out.emit(f"class l={cls.preperiod} n={cls.period}", preperiod=cls.preperiod, period=cls.period)
    if theta in (0, 1):
        out.emit("kneading none", kneading="none")
        return EXIT_OK
    nu = kneading_sequence(theta, d)
    out.emit(f"kneading {nu}", kneading=str(nu))
    lam = _lamination(args)
    try:
        ia = internal_address(theta, lam, truncate=True)
        aia = angled_internal_address(theta, lam, truncate=True)
    except BoundExceeded as exc:
        out.emit(f"address undecided ({exc})", address="undecided")
        return EXIT_UNDECIDED
    out.emit(f"address {ia}", address=str(ia))
    out.emit(f"angled {aia}", angled=str(aia))
    return EXIT_OK


def cmd_lam_build(args, out: Output) -> int:
    lam = _lamination(args)
    if args.output:
        lam.save(args.output)
    path = args.output or _cache_file(args) or "-"
    out.emit(
        f"built d={lam.degree} maxper={lam.max_period} maxpre={lam.max_preperiod} "
        f"components={len(lam.components)} misiurewicz={len(lam.misiurewicz)} file={path}",
        degree=lam.degree, maxper=lam.max_period, maxpre=lam.max_preperiod,
        components=len(lam.components), misiurewicz=len(lam.misiurewicz), file=path,
    )
    return EXIT_OK


def cmd_lam_show(args, out: Output) -> int:
    lam = Lamination.load(args.input) if args.input else _lamination(args)
    out.stream.write(lam.dumps())
    return EXIT_OK


def _group_line(node) -> tuple[str, dict]:
    if node.is_component:
        text = f"leaf {node.root} n={node.period}"
        rec = dict(kind="leaf", id=node.id, lower=node.lo, upper=node.hi, period=node.period)
        if node.coroots:
            text += " coroots=" + ",".join(format_angle(a) for a in node.coroots)
            rec["coroots"] = list(node.coroots)
        return text, rec
    angles = ",".join(format_angle(a) for a in node.angles)
    text = f"misiu {node.id} l={node.preperiod} n={node.period} angles={angles} zerogap={node.zero_gap}"
    rec = dict(kind="misiu", id=node.id, preperiod=node.preperiod, period=node.period,
               angles=list(node.angles), zerogap=node.zero_gap)
    return text, rec


def cmd_pair(args, out: Output) -> int:
    theta = _angle(args.theta)
    lam = _lamination(args)
    node = lam.node_of(theta)
    if node is None:
        raise Undecidable(f"{format_angle(theta)} is beyond max-period {lam.max_period} / max-preperiod {lam.max_preperiod}")
    text, rec = _group_line(node)
    out.emit(text, **rec)
    return EXIT_OK


def cmd_wake(args, out: Output) -> int:
    a, theta = _angle(args.ray), _angle(args.theta)
    lam = _lamination(args)
    node = lam.node_of(a)
    if node is None:
        raise Undecidable(f"{format_angle(a)} is not in the lamination at max-period {lam.max_period}")
    inside = node.in_wake(theta)
    out.emit(f"{'inwake' if inside else 'outside'} {node.id}", node=node.id, theta=theta, inwake=inside)
    return EXIT_OK


def cmd_branch(args, out: Output) -> int:
    a, b = _angle(args.theta1), _angle(args.theta2)
    if a == b or a in (0, 1) or b in (0, 1):
        raise UsageError("branch needs two distinct angles other than 0 and 1")
    res = branch_point(lam := _lamination(args), a, b)
    rec = dict(case=res.case)
    if res.node is not None:
        rec["node"] = res.node.id
    if res.parts:
        rec["parts"] = list(res.parts)
    out.emit(str(res), **rec)
    if not res.decided:
        print(f"undecided at max-period {lam.max_period}", file=sys.stderr)
        return EXIT_UNDECIDED
    return EXIT_OK


def cmd_separate(args, out: Output) -> int:
    a, b = _angle(args.theta1), _angle(args.theta2)
    if a in (0, 1) or b in (0, 1):
        raise UsageError("angles 0 and 1 are not valid here")
    lam = _lamination(args)
    res = separate(lam, a, b, "any" if args.any else "periodic")
    if isinstance(res, SeparationWitness):
        rec = dict(kind=res.kind, rays=list(res.rays), sides=list(res.sides))
        if res.kind == "comp":
            rec["node"] = res.node.id
        out.emit(str(res), **rec)
        return EXIT_OK
    out.emit(str(res), result=str(res))
    if isinstance(res, Undecided):
        print(f"undecided at max-period {lam.max_period}", file=sys.stderr)
        return EXIT_UNDECIDED
    return EXIT_OK


def cmd_class(args, out: Output) -> int:
    a, b = _angle(args.theta1), _angle(args.theta2)
    if a in (0, 1) or b in (0, 1):
        raise UsageError("angles 0 and 1 are not valid here")
    lam = _lamination(args)
    res = same_comb_class(lam, a, b)
    if isinstance(res, Undecided):
        out.emit("undecided", result="undecided")
        print(f"undecided at max-period {lam.max_period}", file=sys.stderr)
        return EXIT_UNDECIDED
    out.emit("true" if res else "false", result=res)
    return EXIT_OK


def cmd_misiu(args, out: Output) -> int:
    theta = _angle(args.theta)
    lam = _lamination(args)
    node = lam.node_of(theta)
    if node is None or node.is_component:
        if node is None and classify(theta, lam.degree).preperiod > 0:
            raise Undecidable(f"{format_angle(theta)} is beyond max-preperiod {lam.max_preperiod}")
        raise UsageError(f"{format_angle(theta)} is not a preperiodic angle")
    text, rec = _group_line(node)
    out.emit(text, **rec)
    for gap in misiurewicz_subwakes(lam, node, strict=False):
        rec = dict(gap=gap.index, lower=gap.lower, upper=gap.upper, zero=gap.zero,
                   witness=gap.witness.id if gap.witness else "none")
        out.emit(str(gap), **rec)
        if gap.witness is None and not gap.zero:
            raise Undecidable(f"no witness in gap {gap.index} up to max-period {lam.max_period}")
    return EXIT_OK


def cmd_approx(args, out: Output) -> int:
    a, b = _angle(args.theta1), _angle(args.theta2)
    lam = _lamination(args)
    node = lam.node_of(a)
    if node is None or not node.is_component or node.root.lower != a or node.root.upper != b:
        raise UsageError(f"{format_angle(a)} {format_angle(b)} is not a root leaf of the lamination")
    try:
        pairs = approximating_pairs(lam, node, args.count)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    for leaf in pairs:
        out.emit(f"pair {leaf}", lower=leaf.lower, upper=leaf.upper)
    return EXIT_OK


def cmd_trace(args, out: Output) -> int:
    from .numerics import trace_parameter_ray

    theta = _angle(args.theta)
    try:
        ray = trace_parameter_ray(args.degree, theta, args.depth, args.t_min)
    except TraceStalled as exc:
        print(str(exc), file=sys.stderr)
        if args.dump and exc.partial is not None:
            out.stream.write(exc.partial.dump())
        return EXIT_NUMERIC
    if args.dump:
        out.stream.write(ray.dump())
    else:
        z = ray.landing
        out.emit(f"land={z.real:.9g} {z.imag:.9g} resid={ray.residual:.3g}",
                 re=f"{z.real:.9g}", im=f"{z.imag:.9g}", resid=f"{ray.residual:.3g}")
    return EXIT_OK


def cmd_validate(args, out: Output) -> int:
    from .numerics import validate_leaf

    lam = _lamination(args)
    status = EXIT_OK
    groups = [c for c in lam.components if c is not lam.main and c.period <= args.period]
    if args.misiu:
        groups += [m for m in lam.misiurewicz if len(m.angles) > 1 and m.preperiod + m.period <= args.period]
    for node in groups:
        # co-roots land elsewhere on the component boundary; only the root pair meets
        rep = validate_leaf(node.root if node.is_component else node.angles, lam.degree, args.tol)
        out.emit(f"{node.id} {rep}", id=node.id, status=rep.status, spread=f"{rep.spread:.3g}")
        if not rep.ok:
            status = EXIT_NUMERIC
    return status


def _viewport(text: Optional[str]):
    if text is None:
        return None
    try:
        vals = tuple(float(x) for x in text.replace(",", " ").split())
    except ValueError:
        raise UsageError(f"bad viewport {text!r}") from None
    if len(vals) != 4:
        raise UsageError("viewport needs four numbers: re0 re1 im0 im1")
    return vals


def cmd_render_lam(args, out: Output) -> int:
    from .render import RenderOptions, lamination_svg

    lam = _lamination(args)
    svg = lamination_svg(lam, RenderOptions(size=args.size, geodesic=not args.straight))
    Path(args.output).write_text(svg, encoding="utf-8")
    out.emit(f"wrote {args.output}", file=args.output)
    return EXIT_OK


def cmd_render_set(args, out: Output) -> int:
    from .render import RenderOptions, set_image

    rays = [_angle(x) for x in args.rays.split(",")] if args.rays else []
    try:
        opt = RenderOptions(size=args.size, viewport=_viewport(args.viewport), overlay_rays=rays,
                            max_iter=args.max_iter)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    img = set_image(args.degree, opt)
    img.save(args.output)
    out.emit(f"wrote {args.output}", file=args.output)
    if img.stalled:
        print("stalled rays: " + ",".join(img.stalled), file=sys.stderr)
        return EXIT_NUMERIC
    return EXIT_OK


# -- parser ------------------------------------------------------------------

def _positive_int(text: str) -> int:
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError("must be >= 1")
    return v


def _positive_float(text: str) -> float:
    v = float(text)
    if not v > 0:
        raise argparse.ArgumentTypeError("must be > 0")
    return v


def _degree(text: str) -> int:
    v = int(text)
    if v < 2:
        raise argparse.ArgumentTypeError("degree must be >= 2")
    return v


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    g = common.add_argument_group("lamination and output")
    g.add_argument("--degree", "-d", type=_degree, default=2)
    g.add_argument("--max-period", type=_positive_int, default=10)
    g.add_argument("--max-preperiod", type=int, default=3)
    g.add_argument("--misiu-period", type=_positive_int, default=None,
                   help="period bound for preperiodic angles (default: --max-period)")
    g.add_argument("--cache", default=None, help=f"cache directory (default: ${CACHE_ENV})")
    g.add_argument("--tol", type=_positive_float, default=1e-2)
    g.add_argument("--format", choices=("text", "machine"), default="text")

    p = _Parser(prog="multibrot", description="Rational-ray combinatorics of Multibrot sets.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    angle = sub.add_parser("angle", help="angle information")
    asub = angle.add_subparsers(dest="action", required=True, parser_class=_Parser)
    info = asub.add_parser("info", parents=[common])
    info.add_argument("theta")
    info.set_defaults(func=cmd_angle_info)

    lam = sub.add_parser("lam", help="build or show laminations")
    lsub = lam.add_subparsers(dest="action", required=True, parser_class=_Parser)
    lb = lsub.add_parser("build", parents=[common])
    lb.add_argument("--output", "-o")
    lb.set_defaults(func=cmd_lam_build)
    ls = lsub.add_parser("show", parents=[common])
    ls.add_argument("--input", "-i")
    ls.set_defaults(func=cmd_lam_show)

    for name, func, nargs in (
        ("pair", cmd_pair, ("theta",)),
        ("wake", cmd_wake, ("ray", "theta")),
        ("branch", cmd_branch, ("theta1", "theta2")),
        ("separate", cmd_separate, ("theta1", "theta2")),
        ("class", cmd_class, ("theta1", "theta2")),
        ("misiu", cmd_misiu, ("theta",)),
        ("approx", cmd_approx, ("theta1", "theta2")),
        ("trace", cmd_trace, ("theta",)),
    ):
        sp = sub.add_parser(name, parents=[common])
        for a in nargs:
            sp.add_argument(a)
        sp.set_defaults(func=func)
        if name == "separate":
            sp.add_argument("--any", action="store_true", help="allow Misiurewicz rays as witnesses")
        if name == "approx":
            sp.add_argument("--count", type=_positive_int, default=3)
        if name == "trace":
            sp.add_argument("--depth", type=_positive_int, default=4)
            sp.add_argument("--t-min", type=_positive_float, default=1e-150)
            sp.add_argument("--dump", action="store_true")

    val = sub.add_parser("validate", parents=[common], help="trace and compare landing groups")
    val.add_argument("--period", type=_positive_int, default=4)
    val.add_argument("--misiu", action="store_true", help="also validate Misiurewicz groups")
    val.set_defaults(func=cmd_validate)

    render = sub.add_parser("render", help="write figures")
    rsub = render.add_subparsers(dest="action", required=True, parser_class=_Parser)
    rl = rsub.add_parser("lam", parents=[common])
    rl.add_argument("--output", "-o", required=True)
    rl.add_argument("--size", type=_positive_int, default=800)
    rl.add_argument("--straight", action="store_true", help="straight chords instead of geodesics")
    rl.set_defaults(func=cmd_render_lam)
    rs = rsub.add_parser("set", parents=[common])
    rs.add_argument("--output", "-o", required=True)
    rs.add_argument("--size", type=_positive_int, default=800)
    rs.add_argument("--viewport")
    rs.add_argument("--rays", default="")
    rs.add_argument("--max-iter", type=_positive_int, default=400)
    rs.set_defaults(func=cmd_render_set)
    return p


def run(argv=None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.max_preperiod < 0:
            raise UsageError("--max-preperiod must be >= 0")
        if args.misiu_period is None:
            args.misiu_period = args.max_period
        if args.misiu_period > args.max_period:
            raise UsageError("--misiu-period cannot exceed --max-period")
        old = sys.stderr
        sys.stderr = stderr
        try:
            return args.func(args, Output(args.format, stdout))
        finally:
            sys.stderr = old
    except UsageError as exc:
        print(f"multibrot: error: {exc}", file=stderr)
        return EXIT_USAGE
    except Undecidable as exc:
        print("undecided", file=stdout)
        print(f"multibrot: {exc}", file=stderr)
        return EXIT_UNDECIDED
    except BoundExceeded as exc:
        print("undecided", file=stdout)
        print(f"multibrot: {exc}", file=stderr)
        return EXIT_UNDECIDED


def main(argv=None) -> None:
    sys.exit(run(argv))


if __name__ == "__main__":
    main()
