"""Command-line surface: group-spec DSL, element expressions, subcommands.

Group files are line oriented::

    # comment
    block 0 : e=4, H=[2]
    block 1..3 : e=8
    block 4.. : e=geom(2,5)

Each line declares blocks for an index range (``INT``, ``INT..INT``, or the
tail form ``INT..``); indices must be contiguous from 0.  Orders are a
positive integer, ``Z``, ``Prufer(p)``, or the tail-only shorthand
``geom(p, start_exp)``.  Elements are written ``3*e[5] + h[2,1]`` with the
side index 1-based.  ``--json`` emits one stable object per invocation;
the enumeration cap honours the MINAP_BUDGET environment variable.
"""

from __future__ import annotations

import argparse
import json
import os
import re
import sys
from dataclasses import is_dataclass
from fractions import Fraction

from . import __version__
from .constructions import (
    AffineRule,
    FactorialRule,
    GeomRule,
    ListRule,
    TriangularParams,
    circle_membership,
    triangular_seq,
)
from .decompose import SubgroupSpec, dispatch_case, minap_admissible
from .errors import MinapError, ParseError
from .groups import (
    Block,
    BlockGroup,
    ConstTail,
    Element,
    GeometricTail,
    INFINITE,
    Prufer,
    _Infinite,
    format_element,
    make_group,
)
from .tseq import DEFAULT_SUM_BUDGET, check_criterion


# -- group DSL ---------------------------------------------------------------------


_LINE = re.compile(
    r"block\s+(?P<lo>\d+)(?P<range>\.\.(?P<hi>\d+)?)?\s*:\s*"
    r"e\s*=\s*(?P<order>\w+(?:\([^)]*\))?)"
    r"(?:\s*,\s*H\s*=\s*\[(?P<hs>[\d\s,]*)\])?\s*$"
)
_GEOM = re.compile(r"geom\(\s*(\d+)\s*,\s*(\d+)\s*\)$")
_PRUFER = re.compile(r"Prufer\(\s*(\d+)\s*\)$")


def _parse_order(text: str, lineno: int, col: int):
    text = text.strip()
    if text == "Z":
        return INFINITE
    m = _PRUFER.match(text)
    if m:
        return Prufer(int(m.group(1)))
    m = _GEOM.match(text)
    if m:
        return ("geom", int(m.group(1)), int(m.group(2)))
    if text.isdigit():
        return int(text)
    raise ParseError(lineno, col, f"unrecognized order {text!r}")


def parse_group(text: str) -> BlockGroup:
    """Parse the line-oriented group DSL into a validated presentation."""
    head: list[Block] = []
    tail = None
    next_index = 0
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if tail is not None:
            raise ParseError(lineno, 1, "no blocks may follow a tail declaration")
        m = _LINE.match(line)
        if not m:
            raise ParseError(lineno, 1, "expected 'block RANGE : e=ORDER[, H=[...]]'")
        lo = int(m.group("lo"))
        if lo != next_index:
            raise ParseError(
                lineno, m.start("lo") + 1, f"indices must be contiguous; expected {next_index}"
            )
        order = _parse_order(m.group("order"), lineno, m.start("order") + 1)
        hs = tuple(
            int(s) for s in (m.group("hs") or "").replace(",", " ").split()
        )
        is_tail = m.group("range") is not None and m.group("hi") is None
        hi = int(m.group("hi")) if m.group("hi") is not None else lo
        if isinstance(order, tuple):  # geometric shorthand, tail only
            if not is_tail:
                raise ParseError(lineno, 1, "geom(...) orders are only valid on a tail range")
            tail = GeometricTail(order[1], order[2], hs)
            continue
        if is_tail:
            tail = ConstTail(Block(order, hs))
            continue
        if hi < lo:
            raise ParseError(lineno, 1, "empty index range")
        for _ in range(lo, hi + 1):
            head.append(Block(order, hs))
            next_index += 1
    try:
        return make_group(head, tail)
    except MinapError as e:
        raise ParseError(0, 0, e.message)


def print_group(G: BlockGroup) -> str:
    """Render a presentation back into the DSL (round-trips through parse)."""

    def order_str(o):
        if isinstance(o, _Infinite):
            return "Z"
        if isinstance(o, Prufer):
            return f"Prufer({o.p})"
        return str(o)

    def h_str(hs):
        return f", H=[{','.join(map(str, hs))}]" if hs else ""

    lines = []
    i = 0
    while i < len(G.head):
        j = i
        while j + 1 < len(G.head) and G.head[j + 1] == G.head[i]:
            j += 1
        blk = G.head[i]
        rng = str(i) if i == j else f"{i}..{j}"
        lines.append(f"block {rng} : e={order_str(blk.e_order)}{h_str(blk.h_orders)}")
        i = j + 1
    if isinstance(G.tail, ConstTail):
        blk = G.tail.block
        lines.append(
            f"block {len(G.head)}.. : e={order_str(blk.e_order)}{h_str(blk.h_orders)}"
        )
    elif isinstance(G.tail, GeometricTail):
        lines.append(
            f"block {len(G.head)}.. : e=geom({G.tail.p},{G.tail.start_exp})"
            f"{h_str(G.tail.h_orders)}"
        )
    return "\n".join(lines) + "\n"


# -- element expressions --------------------------------------------------------------


_TERM = re.compile(
    r"\s*(?P<sign>[+-])?\s*(?:(?P<num>\d+)(?:/(?P<den>\d+))?\s*\*\s*)?"
    r"(?P<kind>[eh])\[\s*(?P<j>\d+)\s*(?:,\s*(?P<i>\d+)\s*)?\]\s*"
)


def parse_element(G: BlockGroup, text: str) -> Element:
    """Parse ``3*e[5] + h[2,1]`` style expressions (whitespace-insensitive)."""
    text = text.strip()
    if text == "0":
        return G.zero()
    pos = 0
    coords: dict[int, list] = {}
    while pos < len(text):
        m = _TERM.match(text, pos)
        if not m:
            raise ParseError(1, pos + 1, f"cannot read an element term at {text[pos:]!r}")
        pos = m.end()
        sign = -1 if m.group("sign") == "-" else 1
        num = int(m.group("num")) if m.group("num") else 1
        coeff = Fraction(num, int(m.group("den"))) if m.group("den") else num
        j = int(m.group("j"))
        blk = G.block(j)
        lam, hs = coords.setdefault(j, [0, [0] * blk.a])
        if m.group("kind") == "e":
            if m.group("i") is not None:
                raise ParseError(1, pos, "e[...] takes a single block index")
            coords[j][0] = lam + sign * coeff
        else:
            i = int(m.group("i")) if m.group("i") is not None else 1
            if not 1 <= i <= blk.a:
                raise ParseError(1, pos, f"block {j} has no side coordinate {i}")
            coords[j][1][i - 1] += sign * num
    return G.element({j: (lam, tuple(hs)) for j, (lam, hs) in coords.items()})


# -- rules -----------------------------------------------------------------------------


_RULE_GEOM = re.compile(r"geom\(\s*(\d+)\s*\)$")
_RULE_AFFINE = re.compile(r"affine\(\s*(-?\d+)\s*,\s*(-?\d+)\s*\)$")
_RULE_LIST = re.compile(r"list\(\s*([-\d\s,]+?)\s*(?:;\s*cycle\s*=\s*(\d+)\s*)?\)$")


def parse_rule(text: str):
    text = text.strip()
    m = _RULE_GEOM.match(text)
    if m:
        return GeomRule(int(m.group(1)))
    m = _RULE_AFFINE.match(text)
    if m:
        return AffineRule(int(m.group(1)), int(m.group(2)))
    if text == "factorial":
        return FactorialRule()
    m = _RULE_LIST.match(text)
    if m:
        values = tuple(int(s) for s in m.group(1).replace(",", " ").split())
        cyc = int(m.group(2)) if m.group(2) else None
        return ListRule(values, cyc)
    raise ParseError(1, 1, f"unrecognized rule {text!r}")


# -- subgroup files --------------------------------------------------------------------


def parse_subgroup(G: BlockGroup, text: str) -> SubgroupSpec:
    """Subgroup files list one generator expression per line, plus optional
    ``tail: h-parts [from N]`` or ``tail: e-parts [from N] [mult M]``."""
    gens: dict[int, list[Element]] = {}
    tail = None
    tail_from = 0
    tail_mult = 1
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("tail:"):
            m = re.match(
                r"tail:\s*(h-parts|e-parts)(?:\s+from\s+(\d+))?(?:\s+mult\s+(\d+))?$",
                line,
            )
            if not m:
                raise ParseError(lineno, 1, "expected 'tail: h-parts|e-parts [from N] [mult M]'")
            tail = m.group(1)
            tail_from = int(m.group(2) or 0)
            tail_mult = int(m.group(3) or 1)
            continue
        x = parse_element(G, line)
        if x.is_zero():
            raise ParseError(lineno, 1, "zero generator")
        gens.setdefault(x.max_block(), []).append(x)
    return SubgroupSpec(
        block_gens=tuple((j, tuple(gs)) for j, gs in sorted(gens.items())),
        tail=tail,
        tail_from=tail_from,
        tail_mult=tail_mult,
    )


# -- output helpers --------------------------------------------------------------------


def _jsonable(obj):
    if obj is None or isinstance(obj, (bool, int, str)):
        return obj
    if isinstance(obj, Fraction):
        return f"{obj.numerator}/{obj.denominator}"
    if isinstance(obj, Element):
        return format_element(obj)
    if isinstance(obj, _Infinite):
        return "INFINITE"
    if is_dataclass(obj) and not isinstance(obj, type):
        return {k: _jsonable(v) for k, v in vars(obj).items()}
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple, set, frozenset)):
        items = list(obj)
        if isinstance(obj, (set, frozenset)):
            items = sorted(items, key=repr)
        return [_jsonable(v) for v in items]
    return repr(obj)


def _emit(args, payload: dict, text: str) -> None:
    if args.json:
        doc = {"version": __version__, "command": args.command}
        doc.update(payload)
        print(json.dumps(_jsonable(doc), sort_keys=True))
    else:
        print(text)


def _budget() -> int:
    try:
        return int(os.environ.get("MINAP_BUDGET", DEFAULT_SUM_BUDGET))
    except ValueError:
        return DEFAULT_SUM_BUDGET


def _load_group(path: str) -> BlockGroup:
    with open(path) as fh:
        return parse_group(fh.read())


# -- commands ---------------------------------------------------------------------------


def _cmd_construct(args) -> int:
    G = _load_group(args.group)
    params = TriangularParams.from_group(G)
    case = "finite side basis" if params.c is not None else "unbounded side basis"
    hyp = "constant lead orders" if params.hyp == "const" else "growing lead orders"
    terms = [(n, format_element(params.term(n))) for n in range(args.index + 1)]
    lines = [f"# {hyp}; {case}"] + [f"d[{n}] = {s}" for n, s in terms]
    _emit(
        args,
        {
            "inputs": {"group": print_group(G), "index": args.index},
            "verdict": {"hypothesis": params.hyp, "terms": dict(terms)},
            "certificate": None,
            "window": args.index,
        },
        "\n".join(lines),
    )
    return 0


def _cmd_tseq_check(args) -> int:
    G = _load_group(args.group)
    seq = triangular_seq(G)
    g = parse_element(G, args.element)
    verdict = check_criterion(seq, g, args.k, args.mmax, args.prefix, _budget())
    cert = verdict.certificate.describe() if verdict.certificate else None
    text = f"{verdict.kind.upper()}"
    if verdict.kind == "excluded":
        text += f" at m={verdict.m}: {cert}"
    elif verdict.kind == "member_up_to":
        text += f" m_max={verdict.m_max}; witness {verdict.witnesses}"
    else:
        text += f": {verdict.report}"
    _emit(
        args,
        {
            "inputs": {
                "group": print_group(G),
                "element": format_element(g),
                "k": args.k,
                "mmax": args.mmax,
                "prefix": args.prefix,
            },
            "verdict": {"kind": verdict.kind, "m": verdict.m, "m_max": verdict.m_max},
            "certificate": cert,
            "window": args.prefix,
        },
        text,
    )
    return verdict.exit_code()


def _cmd_radical(args) -> int:
    from .radical import radical_of

    G = _load_group(args.group)
    params = TriangularParams.from_group(G)
    result = radical_of(params, args.support, args.window)
    lines = [f"tag: {result.tag}", result.detail]
    for j, gens in result.blocks:
        lines.append(f"block {j}: " + (", ".join(format_element(x) for x in gens) or "0"))
    _emit(
        args,
        {
            "inputs": {"group": print_group(G), "support": args.support, "window": args.window},
            "verdict": {
                "tag": result.tag,
                "blocks": {str(j): [format_element(x) for x in gens] for j, gens in result.blocks},
            },
            "certificate": result.detail,
            "window": args.window,
        },
        "\n".join(lines),
    )
    return 0


def _cmd_decompose(args) -> int:
    G = _load_group(args.group)
    with open(args.subgroup) as fh:
        h = parse_subgroup(G, fh.read())
    result = dispatch_case(G, h, args.window)
    lines = [f"case: {result.case}"]
    if result.g0_group is not None:
        lines.append("carrier presentation:")
        lines.append(print_group(result.g0_group).rstrip())
    for m in result.mapping:
        lines.append(f"  {m}")
    if result.x_classes:
        lines.append(f"infinite classes: {[(c.p, c.r) for c in result.x_classes]}")
    for c in result.certificate:
        lines.append(f"  [{'ok' if c.ok else 'FAIL'}] {c.claim}")
    _emit(
        args,
        {
            "inputs": {"group": print_group(G), "window": args.window},
            "verdict": {
                "case": result.case,
                "carrier": print_group(result.g0_group) if result.g0_group else None,
                "mapping": list(result.mapping),
            },
            "certificate": [vars(c) for c in result.certificate],
            "window": args.window,
        },
        "\n".join(lines),
    )
    return 0


def _cmd_minap(args) -> int:
    G = _load_group(args.group)
    ok, witness = minap_admissible(G)
    if ok:
        text = "admissible: true (all leading invariants are infinite)"
    else:
        text = (
            f"admissible: false; witness p={witness.p}, m={witness.m}: multiplication "
            f"by {witness.m} has finite image {[(c.p, c.r, c.count) for c in witness.image_classes]}"
        )
    _emit(
        args,
        {
            "inputs": {"group": print_group(G)},
            "verdict": {"admissible": ok},
            "certificate": witness,
            "window": None,
        },
        text,
    )
    return 0


def _cmd_circle(args) -> int:
    rule = parse_rule(args.rule)
    num, _, den = args.x.partition("/")
    x = Fraction(int(num), int(den) if den else 1)
    result = circle_membership(rule, x)
    text = (
        f"{result.kind}: preperiod={result.preperiod}, period={result.period}, "
        f"cycle residues {list(result.cycle())} mod {result.modulus}"
    )
    _emit(
        args,
        {
            "inputs": {"rule": args.rule, "x": str(x)},
            "verdict": {"kind": result.kind},
            "certificate": {
                "preperiod": result.preperiod,
                "period": result.period,
                "cycle": list(result.cycle()),
                "modulus": result.modulus,
            },
            "window": None,
        },
        text,
    )
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="minap",
        description="exact constructions of group topologies with prescribed "
        "character kernels on countable abelian presentations",
    )
    ap.add_argument("--json", action="store_true", help="emit a stable JSON object")
    shared = argparse.ArgumentParser(add_help=False)
    shared.add_argument(
        "--json", action="store_true", default=argparse.SUPPRESS,
        help="emit a stable JSON object",
    )
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser(
        "construct", parents=[shared], help="print a prefix of the triangular sequence"
    )
    p.add_argument("--group", required=True)
    p.add_argument("--index", type=int, required=True)
    p.set_defaults(fn=_cmd_construct)

    p = sub.add_parser(
        "tseq-check", parents=[shared], help="bounded escape check for one element"
    )
    p.add_argument("--group", required=True)
    p.add_argument("--element", required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--mmax", type=int, required=True)
    p.add_argument("--prefix", type=int, required=True)
    p.set_defaults(fn=_cmd_tseq_check)

    p = sub.add_parser(
        "radical", parents=[shared], help="radical truncation of the sequence topology"
    )
    p.add_argument("--group", required=True)
    p.add_argument("--support", type=int, required=True)
    p.add_argument("--window", type=int, required=True)
    p.set_defaults(fn=_cmd_radical)

    p = sub.add_parser(
        "decompose", parents=[shared], help="route a (group, subgroup) pair to its carrier"
    )
    p.add_argument("--group", required=True)
    p.add_argument("--subgroup", required=True)
    p.add_argument("--window", type=int, default=64)
    p.set_defaults(fn=_cmd_decompose)

    p = sub.add_parser(
        "minap", parents=[shared], help="decide admissibility of a bounded group"
    )
    p.add_argument("--group", required=True)
    p.set_defaults(fn=_cmd_minap)

    p = sub.add_parser(
        "circle", parents=[shared], help="decide u_n * x -> 0 mod 1 for rational x"
    )
    p.add_argument("--rule", required=True)
    p.add_argument("--x", required=True)
    p.set_defaults(fn=_cmd_circle)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as e:
        return 1 if e.code else 0
    try:
        return args.fn(args)
    except MinapError as e:
        if args.json:
            doc = {"version": __version__, "command": args.command}
            doc.update(e.to_json())
            print(json.dumps(_jsonable(doc), sort_keys=True))
        else:
            print(f"error [{e.code}]: {e.message}", file=sys.stderr)
        return 1
    except FileNotFoundError as e:
        print(f"error: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
