"""Small named nets and machines used by tests, docs and the CLI."""

from __future__ import annotations

from .net import Ocn, Process, normalize_pair


def macro_net() -> Ocn:
    """Three states where ``q3 4`` reaches the macrostate (5, 5, 7) after ``aaa``."""
    return Ocn(
        ("q1", "q2", "q3"),
        ("a",),
        (
            ("q2", "a", 1, "q1"),
            ("q1", "a", 0, "q3"),
            ("q3", "a", -1, "q2"),
            ("q3", "a", 1, "q3"),
        ),
        "macro",
    )


def loopy_pair() -> tuple[Ocn, Ocn]:
    """``p`` loops on ``a`` for free, ``q`` pays one unit per ``a``."""
    a = Ocn(("p",), ("a",), (("p", "a", 0, "p"),), "A")
    b = Ocn(("q",), ("a",), (("q", "a", -1, "q"),), "B")
    return a, b


def dd_pair() -> tuple[Ocn, Ocn]:
    """Both sides pay one unit per ``a``; inclusion holds iff m <= n."""
    a = Ocn(("p",), ("a",), (("p", "a", -1, "p"),), "A")
    b = Ocn(("q",), ("a",), (("q", "a", -1, "q"),), "B")
    return a, b


def pump_pair() -> tuple[Ocn, Ocn]:
    """Deterministic pair over t0..t6 and ``$`` with a length-42 witness from (p 0, p' 10).

    The left net pumps the counter by 3 on ``t0 t1 t2`` and by 2 on ``t3 t4``
    and then drains it with ``t5 t6*``; the right net only gains 1 per pump
    cycle. The right net is completed with the sink ``L``.
    """
    alphabet = tuple(f"t{i}" for i in range(7)) + ("$",)
    a_trans = [
        ("p", "t0", 1, "a1"),
        ("a1", "t1", 1, "a2"),
        ("a2", "t2", 1, "p"),
        ("p", "t3", 1, "a3"),
        ("a3", "t4", 1, "p"),
        ("p", "t5", 0, "r"),
        ("r", "t6", -1, "r"),
    ]
    a_states = ("p", "a1", "a2", "a3", "r")
    a_trans += [(s, "$", 0, s) for s in a_states]
    b_trans = [
        ("p'", "t0", 1, "b1"),
        ("b1", "t1", 0, "b2"),
        ("b2", "t2", 0, "p'"),
        ("p'", "t3", 1, "b3"),
        ("b3", "t4", 0, "p'"),
        ("p'", "t5", 0, "r'"),
        ("r'", "t6", -1, "r'"),
    ]
    b_states = ("p'", "b1", "b2", "b3", "r'", "L")
    b_trans += [(s, "$", 0, s) for s in b_states if s != "L"]
    have = {(t[0], t[1]) for t in b_trans}
    for s in b_states[:-1]:
        for x in alphabet:
            if (s, x) not in have:
                b_trans.append((s, x, 0, "L"))
    b_trans += [("L", x, -1, "L") for x in alphabet]
    return (
        Ocn(a_states, alphabet, tuple(a_trans), "A"),
        Ocn(b_states, alphabet, tuple(b_trans), "B"),
    )


PUMP_START = (Process("p", 0), Process("p'", 10))
PUMP_WORD = ("t0", "t1", "t2") + ("t3", "t4") * 9 + ("t5",) + ("t6",) * 20

SAMPLE_ICM = """\
# three states, two counters; q2 is reached only through an incrementing error
icm sample
counters 2
state q0 q1 q2
init q0
final q2
trans q0 inc 1 q1
trans q1 dec 2 q2
trans q2 ifz 2 q0
"""


def normalized(pair: tuple[Ocn, Ocn]):
    return normalize_pair(*pair)
