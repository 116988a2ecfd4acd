"""The reversible toolkit: printed tables, own copy/swap machines and composites."""
from __future__ import annotations

from functools import lru_cache
from itertools import product
from typing import Callable, Sequence

from ..ring import INV_SQRT2, ONE
from .combinators import MARKER, dovetail_all, embed, history_alphabet, reverse_rtm, with_history
from .model import BLANK, L, R, QTMSpec, SpecError, TableBuilder, with_normal_form

BITS = (BLANK, "0", "1")
X = ("0", "1")  # non-blank symbols


def _anything(alphabets) -> list[tuple[str, ...]]:
    return list(product(*alphabets))


def inc_table() -> QTMSpec:
    """Binary increment modulo ``2^|x|``, most significant bit first."""
    return _carry_table("inc", {("1", "0"): ("1", "0"), ("1", "1"): ("0", "1")})


def dec_table() -> QTMSpec:
    """Binary decrement modulo ``2^|x|``."""
    return _carry_table("dec", {("1", "0"): ("1", "1"), ("1", "1"): ("0", "0")})


def _carry_table(name: str, carry_rows: dict) -> QTMSpec:
    b = TableBuilder([BITS])
    for s in BITS:
        b.add("q0", s, s, "q1", L)
    b.add("q1", BLANK, BLANK, "q2", R)
    for x in X:
        b.add("q2", x, x, "q2", R)
    b.add("q2", BLANK, BLANK, "q3.1", L)
    for x in X:
        b.add("q3.0", x, x, "q3.0", L)
    b.add("q3.0", BLANK, BLANK, "qf", R)
    for (c, x), (w, c2) in carry_rows.items():
        b.add(f"q3.{c}", x, w, f"q3.{c2}", L)
    b.add("q3.1", BLANK, BLANK, "qf", R)
    with_normal_form(b, "q0", "qf")
    return b.build("q0", "qf", name)


def eq_table() -> QTMSpec:
    """Three-track comparison: ``x; y; z -> x; y; z xor [x = y]`` in ``2|x| + 6`` steps.

    ``(q3, 0)`` survives the right-to-left sweep only when every column
    matched, and ``(q4, 0)`` is the state that toggles the verdict bit.
    """
    alph = [BITS, BITS, BITS]
    b = TableBuilder(alph)
    every = _anything(alph)
    for s in every:
        b.add("q0", s, s, "q1", L)
        b.add("q1", s, s, "q2", R)
    for x1, x2, z in product(X, X, BITS):
        b.add("q2", (x1, x2, z), (x1, x2, z), "q2", R)
    blank = (BLANK,) * 3
    b.add("q2", blank, blank, "q3.0", L)
    for x, z in product(X, BITS):
        b.add("q3.0", (x, x, z), (x, x, z), "q3.0", L)
    for z in BITS:
        b.add("q3.0", ("0", "1", z), ("0", "1", z), "q3.1", L)
        b.add("q3.0", ("1", "0", z), ("1", "0", z), "q3.1", L)
    b.add("q3.0", blank, blank, "q4.0", R)
    for x1, x2, z in product(X, X, BITS):
        b.add("q3.1", (x1, x2, z), (x1, x2, z), "q3.1", L)
    b.add("q3.1", blank, blank, "q4.1", R)
    for x1, x2 in product(X, X):
        b.add("q4.0", (x1, x2, "0"), (x1, x2, "1"), "q5", L)
        b.add("q4.0", (x1, x2, "1"), (x1, x2, "0"), "q5", L)
        b.add("q4.1", (x1, x2, "0"), (x1, x2, "0"), "q5", L)
        b.add("q4.1", (x1, x2, "1"), (x1, x2, "1"), "q5", L)
    for s in every:
        b.add("q5", s, s, "qf", R)
    with_normal_form(b, "q0", "qf")
    return b.build("q0", "qf", "eq")


def shr_table() -> QTMSpec:
    """Shift the first track one cell to the right (``4|x| + 6`` steps)."""
    b = TableBuilder([BITS])
    for s in BITS:
        b.add("q0", s, s, "q1", L)
    b.add("q1", BLANK, BLANK, "q2", R)
    for x in X:
        b.add("q2", x, x, "q2", R)
    b.add("q2", BLANK, BLANK, "q3", L)
    for x in X:
        b.add("q3", x, x, f"q4.{x}", R)
    b.add("q3", BLANK, BLANK, "q6", R)
    for x in X:
        for s in BITS:
            b.add(f"q4.{x}", s, x, "q5", L)
    for s in BITS:
        b.add("q5", s, s, "q3", L)
        b.add("q6", s, BLANK, "q7", L)
    b.add("q7", BLANK, BLANK, "qf", R)
    with_normal_form(b, "q0", "qf")
    return b.build("q0", "qf", "shr_table")


def shl_table() -> QTMSpec:
    """Shift the first track one cell to the left (``4|x| + 6`` steps)."""
    b = TableBuilder([BITS])
    for s in BITS:
        b.add("q0", s, s, "q1", L)
    b.add("q1", BLANK, BLANK, "q2", R)
    for x in X:
        b.add("q2", x, x, f"q3.{x}", L)
    b.add("q2", BLANK, BLANK, "q5", L)
    for x in X:
        for s in BITS:
            b.add(f"q3.{x}", s, x, "q4", R)
    for s in BITS:
        b.add("q4", s, s, "q2", R)
        b.add("q5", s, BLANK, "q6", L)
    for x in X:
        b.add("q6", x, x, "q6", L)
    b.add("q6", BLANK, BLANK, "q7", R)
    for s in BITS:
        b.add("q7", s, s, "qf", R)
    with_normal_form(b, "q0", "qf")
    return b.build("q0", "qf", "shl_table")


def shift_copy() -> QTMSpec:
    """Copy a track that sits one cell left or right of home; ``2|x| + 8`` steps.

    Also undoes the copy (``v; v -> v; eps``), which the shift composites
    rely on.  The left-shifted case needs ``|x| >= 2`` so that the home
    cell is non-blank.
    """
    alph = [BITS, BITS]
    b = TableBuilder(alph)
    bb = (BLANK, BLANK)
    loaded = [((x, BLANK), (x, x)) for x in X]  # (uncopied, copied) pairs
    for u, c in loaded:
        for s in (u, c):
            b.add("q0", s, s, "qL.1", L)
    b.add("q0", bb, bb, "qR.1", R)
    for d, back in (("L", R), ("R", L)):
        q = lambda i: f"q{d}.{i}"  # noqa: E731
        for u, c in loaded:
            for s in (u, c):
                b.add(q(1), s, s, q(2), L)
                b.add(q(4), s, s, q(4), L)
                b.add(q(5), s, s, q(6), back)
            b.add(q(3), u, c, q(3), R)
            b.add(q(3), c, u, q(3), R)
        b.add(q(2), bb, bb, q(3), R)
        b.add(q(3), bb, bb, q(4), L)
        b.add(q(4), bb, bb, q(5), R)
    for u, c in loaded:
        for s in (u, c):
            b.add("qL.6", s, s, "q7", L)
    b.add("qR.6", bb, bb, "q7", L)
    for s in _anything(alph):
        b.add("q7", s, s, "qf", R)
    with_normal_form(b, "q0", "qf")
    return b.build("q0", "qf", "shift_copy")


def copy_machine(group: Sequence[Sequence[str]] = (BITS,)) -> QTMSpec:
    """``x; eps -> x; x`` and ``x; x -> x; eps`` in ``2|x| + 4`` steps.

    ``group`` lists the alphabets of the source tracks; the destination has
    the same shape, so a multi-track block is copied cell by cell.
    """
    group = [tuple(a) for a in group]
    k = len(group)
    alph = group + group
    blank = (BLANK,) * k
    b = TableBuilder(alph)
    full = [s for s in product(*group) if s != blank]
    for s in _anything(alph):
        b.add("q0", s, s, "q1", L)
    b.add("q1", blank * 2, blank * 2, "q2", R)
    for a in full:
        b.add("q2", a + blank, a + a, "q2", R)
        b.add("q2", a + a, a + blank, "q2", R)
        b.add("q3", a + blank, a + blank, "q3", L)
        b.add("q3", a + a, a + a, "q3", L)
    b.add("q2", blank * 2, blank * 2, "q3", L)
    b.add("q3", blank * 2, blank * 2, "qf", R)
    with_normal_form(b, "q0", "qf")
    return b.build("q0", "qf", "copy")


def swap_machine(group: Sequence[Sequence[str]] = (BITS,)) -> QTMSpec:
    """``x; y -> y; x`` in ``2 max(|x|, |y|) + 4`` steps."""
    group = [tuple(a) for a in group]
    k = len(group)
    alph = group + group
    blank = (BLANK,) * k
    b = TableBuilder(alph)
    cells = list(product(*group))
    for s in _anything(alph):
        b.add("q0", s, s, "q1", L)
    b.add("q1", blank * 2, blank * 2, "q2", R)
    for x in cells:
        for y in cells:
            if x == blank and y == blank:
                continue
            b.add("q2", x + y, y + x, "q2", R)
            b.add("q3", x + y, x + y, "q3", L)
    b.add("q2", blank * 2, blank * 2, "q3", L)
    b.add("q3", blank * 2, blank * 2, "qf", R)
    with_normal_form(b, "q0", "qf")
    return b.build("q0", "qf", "swap")


def _mover(name: str, first: int, alphabets) -> QTMSpec:
    b = TableBuilder(alphabets)
    for s in _anything(alphabets):
        b.add("q0", s, s, "q1", first)
        b.add("q1", s, s, "q2", L)
        b.add("q2", s, s, "qf", R)
    with_normal_form(b, "q0", "qf")
    return b.build("q0", "qf", name)


def move_left(alphabets=(BITS,)) -> QTMSpec:
    """Head one cell left in three steps (L, L, R)."""
    return _mover("move_left", L, [tuple(a) for a in alphabets])


def move_right(alphabets=(BITS,)) -> QTMSpec:
    """Head one cell right in three steps (R, L, R)."""
    return _mover("move_right", R, [tuple(a) for a in alphabets])


def coin() -> QTMSpec:
    """Two tracks; writes a uniformly random bit on track 2 at home and halts at t = 2."""
    alph = [BITS, BITS]
    b = TableBuilder(alph)
    h = INV_SQRT2
    for a in BITS:
        b.add("q0", (a, BLANK), (a, "0"), "q1", R, h)
        b.add("q0", (a, BLANK), (a, "1"), "q1", R, h)
        b.add("q0", (a, "0"), (a, "0"), "q1", R, h)
        b.add("q0", (a, "0"), (a, "1"), "q1", R, -h)
        b.add("q0", (a, "1"), (a, BLANK), "q1", R, ONE)
    for s in _anything(alph):
        b.add("q1", s, s, "qf", L)
    with_normal_form(b, "q0", "qf")
    return b.build("q0", "qf", "coin")


# --------------------------------------------------------------------------
# reversible composites


def io_reversible(m: QTMSpec, history: Sequence[str] | None = None, name: str = "") -> QTMSpec:
    """``x; eps -> x; m(x)`` and back, via history, copy and un-history.

    Tracks: input block, output block (same shape as ``m``'s tape), marker,
    history.  ``history`` may widen the history alphabet so that several
    such machines share one host.
    """
    k = m.tracks
    mh = with_history(m)
    hist = tuple(history) if history is not None else history_alphabet(m)
    host = [*m.alphabets, *m.alphabets, (BLANK, MARKER), hist]
    on_history = [*range(k), 2 * k, 2 * k + 1]
    return dovetail_all(
        embed(mh, on_history, host),
        embed(copy_machine(m.alphabets), list(range(2 * k)), host),
        embed(reverse_rtm(mh), on_history, host),
        name=name or f"io({m.name})",
    )


def invertible_pair(m1: QTMSpec, m2: QTMSpec) -> tuple[QTMSpec, QTMSpec]:
    """Reversible ``N1: x -> m1(x)`` and ``N2: m1(x) -> x`` for mutually inverse ``m1``, ``m2``."""
    if m1.alphabets != m2.alphabets:
        raise SpecError("inverse machines must share an alphabet")
    k = m1.tracks
    hist = tuple(dict.fromkeys(history_alphabet(m1) + history_alphabet(m2)))
    r1 = io_reversible(m1, hist)
    r2 = io_reversible(m2, hist)
    host = r1.alphabets
    sw = embed(swap_machine(m1.alphabets), list(range(2 * k)), host)
    n1 = dovetail_all(r1, sw, r2, name=f"rev({m1.name})")
    n2 = dovetail_all(r2, sw, r1, name=f"rev({m2.name})")
    return n1, n2


def _shift_half(base: QTMSpec, undo_on_result: bool, hist: Sequence[str]) -> QTMSpec:
    """Four-track ``x; eps -> s(x); x`` (``undo_on_result``) or ``x; eps -> x; s(x)``."""
    mh = with_history(base)
    host = [BITS, (BLANK, MARKER), tuple(hist), BITS]
    return dovetail_all(
        embed(mh, [0, 1, 2], host),
        embed(shift_copy(), [0, 3], host),
        embed(reverse_rtm(mh), [3, 1, 2] if undo_on_result else [0, 1, 2], host),
    )


def _shift(first: QTMSpec, second: QTMSpec, go: Callable, back: Callable, name: str) -> QTMSpec:
    hist = tuple(dict.fromkeys(history_alphabet(first) + history_alphabet(second)))
    a = _shift_half(first, True, hist)
    return dovetail_all(
        a,
        go(a.alphabets),
        _shift_half(second, False, hist),
        back(a.alphabets),
        name=name,
    )


def shift_left() -> QTMSpec:
    """Reversible four-track ``x -> shl x`` (tracks 2-4 scratch); needs ``|x| >= 2``."""
    return _shift(shl_table(), shr_table(), move_left, move_right, "shl")


def shift_right() -> QTMSpec:
    """Reversible four-track ``x -> shr x`` (tracks 2-4 scratch); needs ``|x| >= 2``."""
    return _shift(shr_table(), shl_table(), move_right, move_left, "shr")


_BUILDERS: dict[str, Callable[[], QTMSpec]] = {
    "copy": copy_machine,
    "swap": swap_machine,
    "inc": inc_table,
    "dec": dec_table,
    "eq": eq_table,
    "shift_copy": shift_copy,
    "shl_table": shl_table,
    "shr_table": shr_table,
    "move_left": move_left,
    "move_right": move_right,
    "coin": coin,
    "inc_rtm": lambda: invertible_pair(inc_table(), dec_table())[0],
    "dec_rtm": lambda: invertible_pair(inc_table(), dec_table())[1],
    "shl": shift_left,
    "shr": shift_right,
}

BUILTIN_NAMES = tuple(_BUILDERS)


@lru_cache(maxsize=None)
def builtin(name: str) -> QTMSpec:
    try:
        make = _BUILDERS[name]
    except KeyError:
        raise SpecError(f"unknown builtin {name!r}; choose from {', '.join(BUILTIN_NAMES)}") from None
    spec = make()
    return spec if spec.name == name else _renamed(spec, name)


def _renamed(spec: QTMSpec, name: str) -> QTMSpec:
    return QTMSpec(spec.states, spec.alphabets, spec.delta, spec.start, spec.final, name)
