"""Static and dynamic checks: unitarity, reversibility, normal form, stationarity."""
from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass
from itertools import product
from typing import Iterable

from ..ring import ONE, ZERO, ExactAmplitude
from .model import L, R, QTMSpec, SpecError, Transition
from .run import run_deterministic, run_qtm

MATRIX_LIMIT = 200_000
FLOAT_TOL = 1e-9


@dataclass(frozen=True)
class WellFormedReport:
    defect: float
    ok: bool
    exact: bool
    method: str
    columns: int
    worst: tuple | None = None  # column pair with the largest deviation


def _conj(a):
    return a.conj() if isinstance(a, ExactAmplitude) else a.conjugate()


def _zero(exact: bool):
    return ZERO if exact else 0j


def _amp(a, exact: bool):
    return a if exact else complex(a)


def _summarise(gram: dict, diag_keys: Iterable, exact: bool, method: str, columns: int) -> WellFormedReport:
    one = ONE if exact else 1 + 0j
    worst, worst_key = 0.0, None
    exact_ok = True
    for key in diag_keys:
        gram.setdefault((key, key), _zero(exact))
    for (a, b), v in gram.items():
        dev = v - one if a == b else v
        if exact and not dev.is_zero():
            exact_ok = False
        m = abs(complex(dev))
        if m > worst:
            worst, worst_key = m, (a, b)
    ok = exact_ok if exact else worst <= FLOAT_TOL
    return WellFormedReport(worst, ok, exact, method, columns, worst_key)


def configuration_count(spec: QTMSpec, window: int) -> int:
    n_sym = 1
    for a in spec.alphabets:
        n_sym *= len(a)
    return len(spec.delta) * n_sym ** (window - 1) * (window - 2)


def _matrix_route(spec: QTMSpec, window: int, exact: bool) -> WellFormedReport:
    syms = list(spec.symbols())
    defined = defaultdict(list)
    for (p, s) in spec.delta:
        defined[s].append(p)
    rows: dict = defaultdict(list)
    cols = []
    for tape in product(syms, repeat=window):
        for xi in range(1, window - 1):
            for p in defined.get(tape[xi], ()):
                col = (p, tape, xi)
                idx = len(cols)
                cols.append(col)
                for t in spec.delta[(p, tape[xi])]:
                    new = tape[:xi] + (t.write,) + tape[xi + 1 :]
                    rows[(t.state, new, xi + t.move)].append((idx, _amp(t.amp, exact)))
    gram: dict = {}
    for entries in rows.values():
        for i, a in entries:
            ca = _conj(a)
            for j, b in entries:
                key = (cols[i], cols[j])
                gram[key] = gram[key] + ca * b if key in gram else ca * b
    return _summarise(gram, cols, exact, "matrix", len(cols))


def _local_route(spec: QTMSpec, exact: bool) -> WellFormedReport:
    # same head position: columns differ only in (state, scanned symbol)
    by_target: dict = defaultdict(list)
    into: dict = defaultdict(lambda: ([], []))
    for p, s, t in spec.rules():
        a = _amp(t.amp, exact)
        by_target[(t.write, t.state, t.move)].append(((p, s), a))
        into[t.state][0 if t.move == R else 1].append(((p, s, t.write), a))
    gram: dict = {}
    for entries in by_target.values():
        for i, a in entries:
            ca = _conj(a)
            for j, b in entries:
                key = (i, j)
                gram[key] = gram[key] + ca * b if key in gram else ca * b
    # heads two cells apart: a right move and a left move meet in the middle
    for right, left in into.values():
        for (p1, s1, w1), a in right:
            ca = _conj(a)
            for (p2, s2, w2), b in left:
                key = (("R", p1, s1, w1), ("L", p2, s2, w2))
                gram[key] = gram[key] + ca * b if key in gram else ca * b
    return _summarise(gram, list(spec.delta), exact, "local", len(spec.delta))


def validate_well_formed(spec: QTMSpec, window: int = 6, method: str = "auto") -> WellFormedReport:
    """Deviation of ``U^dagger U`` from the identity on interior columns.

    ``matrix`` builds ``U`` on every configuration inside ``window`` cells
    (transitions leaving the window are excluded from the domain); ``local``
    computes the same Gram entries symbolically, which is exact for any
    window and cheap for large alphabets.  ``auto`` picks ``matrix`` when it
    has at most ``MATRIX_LIMIT`` columns.  Undefined transitions are treated
    as absent columns, so partial tables are judged on their defined part.
    """
    if window < 3:
        raise ValueError("window must be at least 3 cells to contain an interior configuration")
    exact = spec.is_exact
    if method == "auto":
        method = "matrix" if configuration_count(spec, window) <= MATRIX_LIMIT else "local"
    if method == "matrix":
        return _matrix_route(spec, window, exact)
    if method == "local":
        return _local_route(spec, exact)
    raise ValueError(f"unknown method {method!r}")


def incoming(spec: QTMSpec) -> dict[str, list[tuple[str, tuple, Transition]]]:
    out: dict = defaultdict(list)
    for p, s, t in spec.rules():
        out[t.state].append((p, s, t))
    return out


def backward_conflicts(spec: QTMSpec) -> list[tuple]:
    """Pairs of rules that can lead to the same configuration.

    Two rules into the same state collide when they move the same way and
    write the same symbol, or when they move in opposite directions.
    """
    bad = []
    for q, rules in incoming(spec).items():
        for i in range(len(rules)):
            for j in range(i + 1, len(rules)):
                (p1, s1, t1), (p2, s2, t2) = rules[i], rules[j]
                if (p1, s1) == (p2, s2):
                    continue
                if t1.move != t2.move or t1.write == t2.write:
                    bad.append(((p1, s1), (p2, s2), q))
    return bad


def is_backward_deterministic(spec: QTMSpec) -> bool:
    return not backward_conflicts(spec)


def is_reversible(spec: QTMSpec) -> bool:
    return spec.is_deterministic and is_backward_deterministic(spec)


def directions(spec: QTMSpec) -> dict[str, set[int]]:
    out: dict = defaultdict(set)
    for _, _, t in spec.rules():
        out[t.state].add(t.move)
    return out


def is_unidirectional(spec: QTMSpec) -> bool:
    return all(len(ds) == 1 for ds in directions(spec).values())


def is_normal_form(spec: QTMSpec) -> bool:
    for s in spec.symbols():
        trs = spec.delta.get((spec.final, s))
        if trs is None or len(trs) != 1:
            return False
        t = trs[0]
        if t.write != s or t.state != spec.start or t.move != R or t.amp != ONE:
            return False
    return True


def head_positions(spec: QTMSpec, inputs: Iterable, max_time: int = 100_000) -> set[int]:
    """Halting head positions over ``inputs`` (tapes or first-track strings)."""
    from .model import TapeWindow

    seen = set()
    for x in inputs:
        tape = x if isinstance(x, TapeWindow) else None
        if spec.is_deterministic:
            r = run_deterministic(spec, tape, x="" if tape is not None else x, max_steps=max_time)
            seen.add(r.head)
        else:
            rep = run_qtm(spec, "" if tape is not None else x, max_time=max_time, tape=tape)
            seen.update(rep.head_positions)
    return seen


def is_stationary_on(spec: QTMSpec, inputs: Iterable, max_time: int = 100_000) -> bool:
    return head_positions(spec, inputs, max_time) <= {0}


def complete(spec: QTMSpec) -> QTMSpec:
    """Extend a partial reversible unidirectional DTM to a total one.

    Each undefined ``(p, sigma)`` is sent to an unused ``(tau, q)`` pair, with
    the move fixed by the direction ``q`` is entered from.  The result's
    evolution operator is a permutation of configurations.
    """
    if not spec.is_deterministic:
        raise SpecError("completion needs a deterministic machine")
    if not is_unidirectional(spec) or not is_backward_deterministic(spec):
        raise SpecError("completion needs a unidirectional reversible machine")
    dirs = {q: next(iter(ds)) for q, ds in directions(spec).items()}
    used = defaultdict(set)
    for _, _, t in spec.rules():
        used[t.state].add(t.write)
    syms = list(spec.symbols())
    free_targets = [(s, q) for q in spec.states for s in syms if s not in used[q]]
    free_sources = [(p, s) for p in spec.states for s in syms if (p, s) not in spec.delta]
    assert len(free_targets) == len(free_sources)
    delta = dict(spec.delta)
    for (p, s), (w, q) in zip(free_sources, free_targets):
        delta[(p, s)] = (Transition(w, q, dirs.get(q, R)),)
    return QTMSpec(spec.states, spec.alphabets, delta, spec.start, spec.final, spec.name)


__all__ = [
    "L",
    "R",
    "WellFormedReport",
    "backward_conflicts",
    "complete",
    "configuration_count",
    "head_positions",
    "is_backward_deterministic",
    "is_normal_form",
    "is_reversible",
    "is_stationary_on",
    "is_unidirectional",
    "validate_well_formed",
]
