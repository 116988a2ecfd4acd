"""Machine-building combinators: track embedding, dovetailing, reversal, history."""
from __future__ import annotations

from itertools import product
from typing import Sequence

from .model import BLANK, L, R, QTMSpec, SpecError, Symbol, TableBuilder, Transition, fresh, rename_states, with_normal_form
from .validate import directions, is_backward_deterministic, is_normal_form, is_unidirectional

MARKER = "@"
END = "$"


def _prefix(spec: QTMSpec, tag: str) -> QTMSpec:
    return rename_states(spec, lambda q: f"{tag}/{q}")


def embed(spec: QTMSpec, positions: Sequence[int], host: Sequence[Sequence[str]]) -> QTMSpec:
    """``M[positions]``: machine track ``i`` runs on host track ``positions[i]``.

    Every other host track is carried through unchanged, so each rule is
    repeated for every combination of symbols there.  Normal-form rows are
    regenerated over the full host alphabet.
    """
    k = len(host)
    if len(positions) != spec.tracks or len(set(positions)) != len(positions):
        raise SpecError("positions must name one distinct host track per machine track")
    for i, j in enumerate(positions):
        if not 0 <= j < k:
            raise SpecError(f"host track {j} out of range")
        missing = set(spec.alphabets[i]) - set(host[j])
        if missing:
            raise SpecError(f"host track {j} lacks symbols {sorted(missing)}")
    others = [j for j in range(k) if j not in positions]
    nf = is_normal_form(spec)
    b = TableBuilder([tuple(a) for a in host])
    b.state(*spec.states)

    def lift(sym: Symbol, rest: tuple) -> Symbol:
        cell = [BLANK] * k
        for i, j in enumerate(positions):
            cell[j] = sym[i]
        for j, c in zip(others, rest):
            cell[j] = c
        return tuple(cell)

    rests = list(product(*(host[j] for j in others)))
    for (p, s), trs in spec.delta.items():
        if nf and p == spec.final:
            continue
        for rest in rests:
            key = (p, lift(s, rest))
            b.delta[key] = [Transition(lift(t.write, rest), t.state, t.move, t.amp) for t in trs]
    if nf:
        with_normal_form(b, spec.start, spec.final)
    return b.build(spec.start, spec.final, spec.name)


def dovetail(m1: QTMSpec, m2: QTMSpec, name: str = "") -> QTMSpec:
    """Run ``m1`` then ``m2`` on the same tape; time is ``T1 + T2``.

    ``m1``'s final state is merged into ``m2``'s start state and the
    composite's final state returns to ``m1``'s start, keeping normal form.
    Both machines must be in normal form and should be stationary.
    """
    if m1.alphabets != m2.alphabets:
        raise SpecError("dovetailed machines must share the tape alphabet; embed them first")
    for m in (m1, m2):
        if not is_normal_form(m):
            raise SpecError(f"{m.name or 'machine'} is not in normal form")
    a, b = _prefix(m1, "1"), _prefix(m2, "2")
    join = b.start
    delta: dict = {}
    for (p, s), trs in a.delta.items():
        if p == a.final:
            continue
        delta[(p, s)] = tuple(Transition(t.write, join if t.state == a.final else t.state, t.move, t.amp) for t in trs)
    for (p, s), trs in b.delta.items():
        if p == b.final:
            continue
        delta[(p, s)] = trs
    for s in product(*m1.alphabets):
        delta[(b.final, s)] = (Transition(s, a.start, R),)
    states = tuple(q for q in a.states if q != a.final) + b.states
    return QTMSpec(states, m1.alphabets, delta, a.start, b.final, name or f"{m1.name};{m2.name}")


def dovetail_all(*machines: QTMSpec, name: str = "") -> QTMSpec:
    out = machines[0]
    for m in machines[1:]:
        out = dovetail(out, m)
    return rename_states(out, lambda q: q, name=name or out.name)


def reverse_rtm(m: QTMSpec, name: str = "") -> QTMSpec:
    """Reversal of a stationary, unidirectional reversible machine.

    State ``~q`` sits on the cell written by the last transition into ``q``
    and undoes it, so ``T -> T'`` in time ``t`` becomes ``T' -> T`` in
    ``t + 2``: one step to reach that cell and one to come back home.
    """
    if not m.is_deterministic:
        raise SpecError("reversal needs a deterministic machine")
    if not is_unidirectional(m):
        raise SpecError("reversal needs a unidirectional machine")
    if not is_backward_deterministic(m):
        raise SpecError("machine is not reversible: two configurations share a successor")
    dirs = {q: next(iter(ds)) for q, ds in directions(m).items()}
    for p, _, t in m.rules():
        if t.state == m.start and p != m.final:
            raise SpecError("the start state may only be entered from the final state")
    bar = {q: f"~{q}" for q in m.states}
    start = fresh("~start", bar.values())
    final = fresh("~final", [*bar.values(), start])
    d0 = dirs.get(m.start, R)
    b = TableBuilder(m.alphabets)
    b.state(start, *bar.values(), final)
    for p, s, t in m.rules():
        if p == m.final:
            continue
        b.add(bar[t.state], t.write, s, bar[p], -dirs.get(p, R))
    syms = list(m.symbols())
    df = dirs.get(m.final, R)
    for s in syms:
        b.add(start, s, s, bar[m.final], -df)
        b.add(bar[m.start], s, s, final, d0)
    with_normal_form(b, start, final)
    return b.build(start, final, name or f"reverse({m.name})")


def history_alphabet(m: QTMSpec) -> tuple[str, ...]:
    pairs = [f"{p}:{'.'.join(s)}" for (p, s) in m.delta if p != m.final]
    return (BLANK, END, *pairs)


def with_history(m: QTMSpec, name: str = "") -> QTMSpec:
    """Reversible simulation of a deterministic machine that logs ``(p, sigma)``.

    Tracks: ``m``'s tracks, then a marker track holding ``@`` at the
    simulated head, then the history track ``# $ (p0,s0) (p1,s1) ...``.
    """
    if not m.is_deterministic:
        raise SpecError("history construction needs a deterministic machine")
    for p, _, t in m.rules():
        if t.state == m.start and p != m.final:
            raise SpecError("the start state may only be entered from the final state")
    k = m.tracks
    hist = history_alphabet(m)
    marks = (BLANK, MARKER)
    inner = [h for h in hist if h not in (BLANK, END)]
    A = list(m.symbols())
    b = TableBuilder([*m.alphabets, marks, hist])
    b.state(*m.states)
    taken = set(m.states)

    def new(label: str) -> str:
        q = fresh(label, taken)
        taken.add(q)
        return q

    def cell(a: Symbol, mark: str, h: str) -> Symbol:
        return (*a, mark, h)

    every = [cell(a, mk, h) for a in A for mk in marks for h in hist]

    qa, qb, qc, qd, qe, qg = (new(f"h.{c}") for c in "abcdeg")
    for a in A:
        b.add(qa, cell(a, BLANK, BLANK), cell(a, MARKER, BLANK), qb, R)
        b.add(qb, cell(a, BLANK, BLANK), cell(a, BLANK, END), qc, R)
    for s in every:
        b.add(qc, s, s, qd, L)
        b.add(qd, s, s, qe, L)
        b.add(qe, s, s, qg, L)
        b.add(qg, s, s, m.start, R)

    back: dict[str, tuple[str, str, str, str]] = {}
    for (p, s), (tr,) in m.delta.items():
        if p == m.final:
            continue
        tag = f"{p}:{'.'.join(s)}"
        q = tr.state
        s1, s2, s3 = (new(f"{q}|{tag}|{i}") for i in (1, 2, 3))
        if q not in back:
            back[q] = tuple(new(f"{q}|{i}") for i in (4, 5, 6, 7))
        q4 = back[q][0]
        for h in hist:
            b.add(p, cell(s, MARKER, h), cell(tr.write, BLANK, h), s1, tr.move)
        for a in A:
            b.add(s1, cell(a, BLANK, END), cell(a, MARKER, END), s3, R)
            for h in inner:
                b.add(s1, cell(a, BLANK, h), cell(a, MARKER, h), s3, R)
                b.add(s3, cell(a, BLANK, h), cell(a, BLANK, h), s3, R)
            b.add(s1, cell(a, BLANK, BLANK), cell(a, MARKER, BLANK), s2, R)
            b.add(s2, cell(a, BLANK, BLANK), cell(a, BLANK, BLANK), s2, R)
            b.add(s2, cell(a, BLANK, END), cell(a, BLANK, END), s3, R)
            b.add(s3, cell(a, BLANK, BLANK), cell(a, BLANK, tag), q4, R)

    for q, (q4, q5, q6, q7) in back.items():
        for a in A:
            b.add(q4, cell(a, BLANK, BLANK), cell(a, BLANK, BLANK), q5, L)
            for h in inner:
                b.add(q5, cell(a, BLANK, h), cell(a, BLANK, h), q5, L)
                b.add(q5, cell(a, MARKER, h), cell(a, MARKER, h), q7, L)
            b.add(q5, cell(a, BLANK, END), cell(a, BLANK, END), q6, L)
            b.add(q5, cell(a, MARKER, END), cell(a, MARKER, END), q7, L)
            b.add(q6, cell(a, BLANK, BLANK), cell(a, BLANK, BLANK), q6, L)
            b.add(q6, cell(a, MARKER, BLANK), cell(a, MARKER, BLANK), q7, L)
        for s in every:
            b.add(q7, s, s, q, R)

    with_normal_form(b, qa, m.final)
    spec = b.build(qa, m.final, name or f"history({m.name})")
    if spec.tracks != k + 2:
        raise AssertionError("unexpected track count")
    return spec
