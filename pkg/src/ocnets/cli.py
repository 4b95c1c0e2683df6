"""Command-line interface: ``ocnets <command> ...``."""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys
import time
from concurrent.futures import ThreadPoolExecutor

from . import ineq, oracles
from .inclusion import Included, NotIncluded, SearchStats, decide_inclusion
from .net import NetError, Process, classify_net, normalize_pair
from .product import (
    build_product,
    classify_loop,
    distinguishing_actions,
    enumerate_loops,
    is_witness,
    replay,
)
from .reductions import (
    DecodeError,
    IcmError,
    ReductionError,
    counting_gadget,
    decode_witness,
    fast_growing,
    fast_growing_omega,
    icm_to_ocn,
)
from .rewrite import RewriteError, RuleInstance, RuleName, apply_rule, normalize_steps, sanitize, weight
from .textio import ParseError, parse_icm, parse_ocn, parse_process, serialize_dictionary, serialize_ocn
from .universality import search_nonuniversality

EXIT_HOLDS, EXIT_WITNESS, EXIT_UNKNOWN, EXIT_INPUT = 0, 1, 2, 3


class InputError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    """Usage errors exit with the input-error code rather than argparse's 2."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INPUT, f"{self.prog}: error: {message}\n")


# -- reports -----------------------------------------------------------------


def _scalar(v):
    if v is None:
        return "none"
    if isinstance(v, bool):
        return "true" if v else "false"
    return str(v)


def render_text(obj, indent: int = 0) -> str:
    """Key/value text: nested mappings indent, lists use ``- `` items."""
    pad = "  " * indent
    lines = []
    if isinstance(obj, dict):
        for k, v in obj.items():
            if isinstance(v, (dict, list)) and v:
                lines.append(f"{pad}{k}:")
                lines.append(render_text(v, indent + 1))
            elif isinstance(v, (dict, list)):
                lines.append(f"{pad}{k}: []" if isinstance(v, list) else f"{pad}{k}: {{}}")
            else:
                lines.append(f"{pad}{k}: {_scalar(v)}")
    elif isinstance(obj, list):
        for v in obj:
            if isinstance(v, dict) and v:
                inner = render_text(v, indent + 1).split("\n")
                lines.append(f"{pad}- {inner[0].strip()}")
                lines.extend(inner[1:])
            elif isinstance(v, list):
                lines.append(f"{pad}- " + " ".join(_scalar(x) for x in v))
            else:
                lines.append(f"{pad}- {_scalar(v)}")
    else:
        lines.append(pad + _scalar(obj))
    return "\n".join(lines)


def emit(report: dict, as_json: bool, stream=None):
    stream = stream or sys.stdout
    if as_json:
        json.dump(report, stream, indent=2, default=str)
        stream.write("\n")
    else:
        stream.write(render_text(report) + "\n")


def _digest(*texts: str) -> str:
    h = hashlib.sha256()
    for t in texts:
        h.update(t.encode())
        h.update(b"\0")
    return h.hexdigest()[:16]


def _read(path: str) -> str:
    try:
        with open(path, encoding="utf-8") as fh:
            return fh.read()
    except OSError as e:
        raise InputError(f"{path}: {e.strerror}") from e


def _net(path):
    text = _read(path)
    try:
        return parse_ocn(text), text
    except ParseError as e:
        raise InputError(f"{path}: {e}") from e


def _icm(path):
    text = _read(path)
    try:
        return parse_icm(text), text
    except ParseError as e:
        raise InputError(f"{path}: {e}") from e


def _proc(s):
    try:
        return parse_process(s)
    except ParseError as e:
        raise InputError(str(e)) from e


def _normal_form(a, b):
    """Nets ready for the product: unchanged when already normal, else normalised."""
    ka, kb = classify_net(a), classify_net(b)
    if ka.deterministic and kb.deterministic and kb.complete and set(a.alphabet) == set(b.alphabet):
        return a, b, None
    pair = normalize_pair(a, b)
    if not classify_net(pair.b).deterministic:
        raise InputError("right net is nondeterministic; inclusion needs a deterministic right side")
    return pair.a, pair.b, pair.labels


# -- commands ----------------------------------------------------------------


def cmd_normalize(args):
    a, ta = _net(args.left)
    b, tb = _net(args.right)
    pair = normalize_pair(a, b)
    return EXIT_HOLDS, {
        "command": "normalize",
        "inputs": _digest(ta, tb),
        "left": serialize_ocn(pair.a).splitlines(),
        "right": serialize_ocn(pair.b).splitlines(),
        "labels": dict(pair.labels),
    }


def cmd_product(args):
    a, ta = _net(args.left)
    b, tb = _net(args.right)
    if args.normalize:
        a, b, _ = _normal_form(a, b)
    g = build_product(a, b)
    return EXIT_HOLDS, {
        "command": "product",
        "inputs": _digest(ta, tb),
        "nodes": [f"({p},{q})" for p, q in g.nodes],
        "edges": [str(e) for e in g.edges],
    }


def cmd_loops(args):
    a, ta = _net(args.left)
    b, tb = _net(args.right)
    if args.normalize:
        a, b, _ = _normal_form(a, b)
    g = build_product(a, b)
    rows = []
    for L in enumerate_loops(g):
        s, kind = classify_loop(L)
        rows.append(
            {
                "anchor": f"({L.anchor[0]},{L.anchor[1]})",
                "word": " ".join(L.path.word),
                "effects": list(L.effects),
                "slope": str(s),
                "type": str(kind),
            }
        )
    return EXIT_HOLDS, {"command": "loops", "inputs": _digest(ta, tb), "loops": rows}


def cmd_include(args):
    a0, ta = _net(args.left)
    b0, tb = _net(args.right)
    pm, qn = _proc(args.p), _proc(args.q)
    a, b, labels = _normal_form(a0, b0)
    stats = SearchStats()
    t = time.perf_counter()
    verdict = decide_inclusion(
        a, b, pm, qn, budget=args.budget, complete=args.complete,
        on_exhaust="unknown" if args.strict else "included", stats=stats,
    )
    elapsed = time.perf_counter() - t
    report = {
        "command": "include",
        "inputs": _digest(ta, tb),
        "left": f"{a0.name} {pm}",
        "right": f"{b0.name} {qn}",
        "budget": "c" if args.complete else args.budget,
    }
    if isinstance(verdict, NotIncluded):
        g = build_product(a, b)
        end = replay(g, verdict.witness, (pm, qn))
        acts = distinguishing_actions(g, end)
        word = list(verdict.witness.word)
        report.update(
            verdict="not-included",
            witness=" ".join(word),
            distinguishing=" ".join(acts),
            template=verdict.template.describe(),
            exponents=list(verdict.exponents),
        )
        if labels is not None:
            report["witness_original"] = " ".join(labels.get(x, x) for x in word + acts[:1])
        code = EXIT_WITNESS
    elif isinstance(verdict, Included):
        report.update(verdict="included", certified=verdict.certified, exhausted=stats.exhausted)
        code = EXIT_HOLDS
    else:
        report.update(verdict="unknown")
        code = EXIT_UNKNOWN
    if args.oracle_depth is not None:
        o = oracles.inclusion_oracle(a, b, pm, qn, args.oracle_depth)
        report["oracle"] = {"status": o.status, "witness": " ".join(o.word) if o.word is not None else None}
        if o.found and not isinstance(verdict, NotIncluded):
            report["oracle"]["disagrees"] = True
    report["stats"] = {
        "configs": stats.configs,
        "connectors": stats.connectors,
        "loops": stats.loops,
        "templates": stats.templates,
        "seconds": round(elapsed, 6),
        "V": len(build_product(a, b)),
    }
    return code, report


def cmd_universal(args):
    net, text = _net(args.net)
    p = _proc(args.process)
    try:
        net.check_state(p.state)
    except NetError as e:
        raise InputError(str(e)) from e
    t = time.perf_counter()
    r = search_nonuniversality(net, p, shortest=args.shortest, max_len=args.budget, node_budget=args.nodes)
    report = {"command": "universal", "inputs": _digest(text), "process": str(p)}
    if r.witness is not None:
        report.update(verdict="not-universal", witness=" ".join(r.witness), length=len(r.witness))
        code = EXIT_WITNESS
    elif r.conclusive:
        report.update(verdict="universal")
        code = EXIT_HOLDS
    else:
        report.update(verdict="unknown")
        code = EXIT_UNKNOWN
    report["stats"] = {"nodes": r.nodes, "seconds": round(time.perf_counter() - t, 6)}
    return code, report


def cmd_rewrite(args):
    a0, ta = _net(args.left)
    b0, tb = _net(args.right)
    pm, qn = _proc(args.p), _proc(args.q)
    a, b, _ = _normal_form(a0, b0)
    g = build_product(a, b)
    start = (pm, qn)
    try:
        path = g.path_from_word((pm.state, qn.state), args.word)
    except NetError as e:
        raise InputError(str(e)) from e
    report = {"command": "rewrite", "inputs": _digest(ta, tb), "input_length": len(path)}
    if args.rule:
        if None in (args.i, args.j, args.x, args.y):
            raise InputError("--rule needs --i, --j, --x and --y")
        inst = RuleInstance(RuleName(args.rule), args.i, args.j, args.x, args.y)
        out = apply_rule(path, inst, len(g))
        report.update(
            rule=str(inst),
            output=" ".join(out.word),
            output_length=len(out),
            witness=is_witness(g, out, start),
        )
        return EXIT_HOLDS, report
    path = sanitize(g, path, start)
    steps = []
    for st in normalize_steps(g, path, start):
        steps.append({"rule": str(st.instance), "length": len(st.path), "weight": list(st.weight)})
        path = st.path
    report.update(steps=steps, output=" ".join(path.word), output_length=len(path), weight=list(weight(path)))
    return EXIT_HOLDS, report


def cmd_gen(args):
    if args.what == "icm2ocn":
        m, text = _icm(args.file)
        out = icm_to_ocn(m)
        net_text = serialize_ocn(out.net)
        dict_text = serialize_dictionary(out)
        if args.out:
            with open(args.out, "w", encoding="utf-8") as fh:
                fh.write(net_text)
        if args.dict:
            with open(args.dict, "w", encoding="utf-8") as fh:
                fh.write(dict_text)
        return EXIT_HOLDS, {
            "command": "gen icm2ocn",
            "inputs": _digest(text),
            "init": str(out.init),
            "net": net_text.splitlines(),
            "dictionary": dict_text.splitlines(),
        }
    if args.k is None or args.m is None or args.n is None:
        raise InputError("gen gadget needs --k, --m and --n")
    net, M = counting_gadget(args.k, args.m, args.n)
    start = {q: v for q, v in zip(net.states, M) if v is not None}
    return EXIT_HOLDS, {
        "command": "gen gadget",
        "net": serialize_ocn(net).splitlines(),
        "macrostate": start,
    }


def cmd_decode(args):
    m, text = _icm(args.icm)
    out = icm_to_ocn(m)
    word = args.word if len(args.word) != 1 else args.word[0].split()
    run = decode_witness(out, word)
    report = {"command": "decode", "inputs": _digest(text), "word": " ".join(word)}
    if run is None:
        report["verdict"] = "invalid"
        return EXIT_UNKNOWN, report
    report["verdict"] = "run"
    report["run"] = [f"{st.letter} -> {st.config}" for st in run]
    return EXIT_HOLDS, report


def _nat(s: str) -> int:
    s = s.strip()
    try:
        v = int(s[2:], 2) if s.startswith("0b") else int(s, 10)
    except ValueError:
        raise InputError(f"{s!r} is neither binary (0b...) nor decimal") from None
    if v < 0:
        raise InputError(f"{s!r} is negative")
    return v


def cmd_ineq(args):
    vals = [_nat(x) for x in (args.m, args.A, args.B, args.n, args.C, args.D)]
    r = ineq.stream_check(*vals)
    m, A, B, n, C, D = vals
    return (EXIT_HOLDS if r.holds else EXIT_WITNESS), {
        "command": "ineq",
        "inequality": f"{m}*{A} + {B} >= {n}*{C} + {D}",
        "holds": r.holds,
        "scratch_bits": r.max_scratch_bits,
        "operand_bits": r.operand_bits,
    }


def cmd_fgh(args):
    try:
        v = fast_growing_omega(args.x) if args.omega else fast_growing(args.k, args.x)
    except OverflowError as e:
        raise InputError(str(e)) from e
    return EXIT_HOLDS, {"command": "fgh", "k": "omega" if args.omega else args.k, "x": args.x, "value": v}


def _seed_range(s: str) -> range:
    lo, sep, hi = s.partition(":")
    try:
        return range(int(lo), int(hi)) if sep else range(int(lo))
    except ValueError:
        raise InputError(f"seed range {s!r} must be N or LO:HI") from None


def cmd_difftest(args):
    from . import difftest

    params = oracles.GenParams(max_states=args.states, actions=args.actions)
    seeds = _seed_range(args.seeds)
    fn = difftest.include_case if args.kind == "include" else difftest.universal_case
    with ThreadPoolExecutor(max_workers=args.workers) as pool:
        cases = list(pool.map(lambda s: fn(s, params), seeds))
    failures = [c for c in cases if not c.ok]
    if args.dump and failures:
        os.makedirs(args.dump, exist_ok=True)
        for c in failures:
            with open(os.path.join(args.dump, f"{args.kind}-{c.seed}.txt"), "w", encoding="utf-8") as fh:
                fh.write(render_text({"seed": c.seed, "detail": c.detail, **c.data}) + "\n")
    return (EXIT_HOLDS if not failures else EXIT_WITNESS), {
        "command": f"difftest {args.kind}",
        "seeds": f"{seeds.start}:{seeds.stop}",
        "cases": len(cases),
        "failures": [{"seed": c.seed, "detail": c.detail} for c in failures],
    }


# -- parser ------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="ocnets", description=__doc__)
    p.add_argument("--json", action="store_true", help="emit JSON instead of key/value text")
    sub = p.add_subparsers(dest="command", required=True)

    def pair(sp, norm=False):
        sp.add_argument("left", help="left net file")
        sp.add_argument("right", help="right net file")
        if norm:
            sp.add_argument("--normalize", action="store_true", help="normalise the pair first")

    sp = sub.add_parser("normalize", help="relabel/complete a pair of nets")
    pair(sp)
    sp.set_defaults(func=cmd_normalize)

    sp = sub.add_parser("product", help="print the product graph")
    pair(sp, True)
    sp.set_defaults(func=cmd_product)

    sp = sub.add_parser("loops", help="list simple loops of the product with slope and type")
    pair(sp, True)
    sp.set_defaults(func=cmd_loops)

    sp = sub.add_parser("include", help="decide trace inclusion left p <= right q")
    pair(sp)
    sp.add_argument("p", help="left process state:counter")
    sp.add_argument("q", help="right process state:counter")
    sp.add_argument("--budget", type=int, default=8, help="length bound for short paths (default 8)")
    sp.add_argument("--complete", action="store_true", help="search to the full bound c")
    sp.add_argument("--oracle-depth", type=int, default=None, help="cross-check with a BFS oracle")
    sp.add_argument("--strict", action="store_true", help="report 'unknown' instead of uncertified inclusion")
    sp.set_defaults(func=cmd_include)

    sp = sub.add_parser("universal", help="decide trace universality of a process")
    sp.add_argument("net")
    sp.add_argument("process", help="state:counter")
    sp.add_argument("--shortest", action="store_true", help="return a shortest (lex-least) witness")
    sp.add_argument("--budget", type=int, default=None, help="maximal witness length")
    sp.add_argument("--nodes", type=int, default=None, help="maximal number of search nodes")
    sp.set_defaults(func=cmd_universal)

    sp = sub.add_parser("rewrite", help="apply one rule instance or normalise a witness")
    pair(sp)
    sp.add_argument("p")
    sp.add_argument("q")
    sp.add_argument("word", nargs="*", help="witness as actions of the normal-form pair")
    sp.add_argument("--rule", choices=[r.value for r in RuleName])
    sp.add_argument("--i", type=int)
    sp.add_argument("--j", type=int)
    sp.add_argument("--x", type=int)
    sp.add_argument("--y", type=int)
    sp.set_defaults(func=cmd_rewrite)

    sp = sub.add_parser("gen", help="generate hardness instances")
    sp.add_argument("what", choices=["icm2ocn", "gadget"])
    sp.add_argument("file", nargs="?", help="machine file (icm2ocn)")
    sp.add_argument("--out", help="write the net here")
    sp.add_argument("--dict", help="write the action dictionary here")
    sp.add_argument("--k", type=int)
    sp.add_argument("--m", type=int)
    sp.add_argument("--n", type=int)
    sp.set_defaults(func=cmd_gen)

    sp = sub.add_parser("decode", help="decode a reduction witness into a machine run")
    sp.add_argument("icm")
    sp.add_argument("word", nargs="+")
    sp.set_defaults(func=cmd_decode)

    sp = sub.add_parser("ineq", help="check m*A + B >= n*C + D by bit streaming")
    for name in ("m", "A", "B", "n", "C", "D"):
        sp.add_argument(name)
    sp.set_defaults(func=cmd_ineq)

    sp = sub.add_parser("difftest", help="compare a procedure with its oracle on random instances")
    sp.add_argument("kind", choices=["include", "universal"])
    sp.add_argument("--seeds", default="100", help="N or LO:HI")
    sp.add_argument("--states", type=int, default=3)
    sp.add_argument("--actions", type=int, default=2)
    sp.add_argument("--workers", type=int, default=4)
    sp.add_argument("--dump", help="directory for failing cases")
    sp.set_defaults(func=cmd_difftest)

    sp = sub.add_parser("fgh", help="evaluate the fast-growing hierarchy")
    sp.add_argument("--k", type=int, default=0)
    sp.add_argument("--x", type=int, required=True)
    sp.add_argument("--omega", action="store_true", help="compute F_omega(x) = F_x(x)")
    sp.set_defaults(func=cmd_fgh)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "gen" and args.what == "icm2ocn" and not args.file:
        parser.error("gen icm2ocn needs a machine file")
    try:
        code, report = args.func(args)
    except (InputError, NetError, IcmError, ReductionError, DecodeError, RewriteError, ParseError, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INPUT
    emit(report, args.json)
    return code


if __name__ == "__main__":
    sys.exit(main())
