"""Line-oriented text formats for nets, counter machines and action dictionaries.

A line whose first non-blank character is ``#`` is a comment. Comments are
full-line only because ``#`` is itself an action in generated nets.
"""

from __future__ import annotations

from typing import Optional

from .net import NetError, Ocn, Process
from .reductions import Icm, IcmError, ReductionOutput


class ParseError(ValueError):
    def __init__(self, msg: str, line: Optional[int] = None):
        self.line = line
        super().__init__(f"line {line}: {msg}" if line is not None else msg)


def _lines(text: str):
    for no, raw in enumerate(text.splitlines(), 1):
        s = raw.strip()
        if not s or s.startswith("#"):
            continue
        yield no, s.split()


def parse_ocn(text: str) -> Ocn:
    name = None
    states: list[str] = []
    alphabet: list[str] = []
    trans = []
    where = {}
    for no, toks in _lines(text):
        kw, args = toks[0], toks[1:]
        if kw == "net":
            if len(args) != 1:
                raise ParseError("expected: net <id>", no)
            if name is not None:
                raise ParseError("second net header", no)
            name = args[0]
        elif kw == "alphabet":
            if not args:
                raise ParseError("expected: alphabet <tok>+", no)
            for a in args:
                if a in alphabet:
                    raise ParseError(f"duplicate action {a!r}", no)
                alphabet.append(a)
        elif kw == "state":
            if not args:
                raise ParseError("expected: state <id>+", no)
            for q in args:
                if q in states:
                    raise ParseError(f"duplicate state {q!r}", no)
                states.append(q)
        elif kw == "trans":
            if len(args) != 4:
                raise ParseError("expected: trans <src> <action> <-1|0|1> <dst>", no)
            src, act, eff, dst = args
            if eff not in ("-1", "0", "1", "+1"):
                raise ParseError(f"effect {eff!r} is not one of -1, 0, 1", no)
            for q in (src, dst):
                if q not in states:
                    raise ParseError(f"undeclared state {q!r}", no)
            if act not in alphabet:
                raise ParseError(f"action {act!r} is not in the alphabet", no)
            t = (src, act, int(eff), dst)
            if t in where:
                raise ParseError(f"duplicate transition (first on line {where[t]})", no)
            where[t] = no
            trans.append(t)
        else:
            raise ParseError(f"unknown keyword {kw!r}", no)
    try:
        return Ocn(tuple(states), tuple(alphabet), tuple(trans), name or "N")
    except NetError as e:
        raise ParseError(str(e)) from e


def serialize_ocn(net: Ocn) -> str:
    out = [f"net {net.name}", "alphabet " + " ".join(net.alphabet)]
    if net.states:
        out.append("state " + " ".join(net.states))
    out += [f"trans {t.src} {t.action} {t.effect} {t.dst}" for t in net.transitions]
    return "\n".join(out) + "\n"


def parse_icm(text: str) -> Icm:
    name, k, init, final = None, None, None, None
    states: list[str] = []
    trans = []
    where = {}
    for no, toks in _lines(text):
        kw, args = toks[0], toks[1:]
        if kw == "icm":
            if len(args) != 1:
                raise ParseError("expected: icm <id>", no)
            name = args[0]
        elif kw == "counters":
            if len(args) != 1 or not args[0].isdigit():
                raise ParseError("expected: counters <k>", no)
            k = int(args[0])
        elif kw == "state":
            if not args:
                raise ParseError("expected: state <id>+", no)
            for q in args:
                if q in states:
                    raise ParseError(f"duplicate state {q!r}", no)
                states.append(q)
        elif kw in ("init", "final"):
            if len(args) != 1:
                raise ParseError(f"expected: {kw} <id>", no)
            if args[0] not in states:
                raise ParseError(f"undeclared state {args[0]!r}", no)
            if kw == "init":
                init = args[0]
            else:
                final = args[0]
        elif kw == "trans":
            if len(args) != 4:
                raise ParseError("expected: trans <src> <inc|dec|ifz> <i> <dst>", no)
            src, op, i, dst = args
            if op not in ("inc", "dec", "ifz"):
                raise ParseError(f"unknown operation {op!r}", no)
            if not i.isdigit():
                raise ParseError(f"counter index {i!r} is not a number", no)
            if k is None:
                raise ParseError("counters must be declared before transitions", no)
            if not 1 <= int(i) <= k:
                raise ParseError(f"counter {i} outside 1..{k}", no)
            for q in (src, dst):
                if q not in states:
                    raise ParseError(f"undeclared state {q!r}", no)
            t = (src, op, int(i), dst)
            if t in where:
                raise ParseError(f"duplicate transition (first on line {where[t]})", no)
            where[t] = no
            trans.append(t)
        else:
            raise ParseError(f"unknown keyword {kw!r}", no)
    if k is None or init is None or final is None:
        raise ParseError("machine needs counters, init and final lines")
    try:
        return Icm(name or "M", tuple(states), k, tuple(trans), init, final)
    except IcmError as e:
        raise ParseError(str(e)) from e


def serialize_icm(m: Icm) -> str:
    out = [f"icm {m.name}", f"counters {m.counters}"]
    if m.states:
        out.append("state " + " ".join(m.states))
    out += [f"init {m.init}", f"final {m.final}"]
    out += [f"trans {t.src} {t.op} {t.counter} {t.dst}" for t in m.transitions]
    return "\n".join(out) + "\n"


def parse_process(s: str) -> Process:
    """``state:counter``; the state name may itself contain colons."""
    state, sep, num = s.rpartition(":")
    if not sep or not state or not num.isdigit():
        raise ParseError(f"process {s!r} is not of the form state:counter")
    return Process(state, int(num))


def serialize_dictionary(out: ReductionOutput) -> str:
    """One line per action: ``<action> start|end|trans <src> <op> <i> <dst>|error <i>``."""
    lines = [f"init {out.init.state} {out.init.counter}"]
    for x, kind in out.dictionary.items():
        if kind[0] == "trans":
            lines.append(f"{x} trans {out.machine.transitions[kind[1]]}")
        elif kind[0] == "error":
            lines.append(f"{x} error {kind[1]}")
        else:
            lines.append(f"{x} {kind[0]}")
    return "\n".join(lines) + "\n"


def parse_dictionary(text: str, m: Icm) -> dict:
    """Inverse of serialize_dictionary against the machine it was generated from.

    Every line is a record here, so ``#`` (the start action) is not a comment.
    """
    out = {}
    for no, raw in enumerate(text.splitlines(), 1):
        toks = raw.split()
        if not toks or toks[0] == "init":
            continue
        x, kind, rest = toks[0], toks[1] if len(toks) > 1 else "", toks[2:]
        if kind in ("start", "end") and not rest:
            out[x] = (kind,)
        elif kind == "error" and len(rest) == 1 and rest[0].isdigit():
            out[x] = ("error", int(rest[0]))
        elif kind == "trans" and len(rest) == 4:
            t = (rest[0], rest[1], int(rest[2]), rest[3])
            try:
                out[x] = ("trans", list(m.transitions).index(t))
            except ValueError:
                raise ParseError(f"transition {' '.join(rest)} is not in the machine", no) from None
        else:
            raise ParseError(f"bad dictionary entry {raw.strip()!r}", no)
    return out
