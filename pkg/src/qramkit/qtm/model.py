"""Multi-track QTM descriptions, tape windows and the text file format."""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from functools import cached_property
from itertools import product
from typing import Iterable, Iterator, Mapping, Sequence, Union

from ..ring import ONE, ExactAmplitude, format_amplitude, parse_amplitude

BLANK = "#"
L, R = -1, 1

Symbol = tuple[str, ...]
Amplitude = Union[ExactAmplitude, complex]


class SpecError(ValueError):
    pass


def move_name(d: int) -> str:
    return "L" if d == L else "R"


def parse_move(tok: str) -> int:
    if tok == "L":
        return L
    if tok == "R":
        return R
    raise SpecError(f"bad direction {tok!r}")


def is_one(a: Amplitude) -> bool:
    if isinstance(a, ExactAmplitude):
        return a == ONE
    return abs(a - 1) < 1e-12


@dataclass(frozen=True)
class Transition:
    write: Symbol
    state: str
    move: int
    amp: Amplitude = ONE


@dataclass(frozen=True)
class QTMSpec:
    """``(Q, Sigma_1 x ... x Sigma_k, delta, q0, qf)`` with a sparse ``delta``.

    ``delta[(p, sigma)]`` lists the branches ``(tau, q, d, amplitude)``;
    a missing key means the transition is undefined (partial machine).
    """

    states: tuple[str, ...]
    alphabets: tuple[tuple[str, ...], ...]
    delta: Mapping[tuple[str, Symbol], tuple[Transition, ...]]
    start: str
    final: str
    name: str = ""

    def __post_init__(self) -> None:
        if self.start == self.final:
            raise SpecError("start and final state must differ")
        known = set(self.states)
        for q in (self.start, self.final):
            if q not in known:
                raise SpecError(f"state {q!r} not declared")
        for a in self.alphabets:
            if BLANK not in a:
                raise SpecError("every track alphabet must contain the blank '#'")
        k = len(self.alphabets)
        sets = [set(a) for a in self.alphabets]
        for (p, sym), trs in self.delta.items():
            if p not in known:
                raise SpecError(f"state {p!r} not declared")
            for s in (sym, *(t.write for t in trs)):
                if len(s) != k or any(c not in sets[i] for i, c in enumerate(s)):
                    raise SpecError(f"symbol {s!r} not in the tape alphabet")
            targets = set()
            for t in trs:
                if t.state not in known:
                    raise SpecError(f"state {t.state!r} not declared")
                key = (t.write, t.state, t.move)
                if key in targets:
                    raise SpecError(f"duplicate branch {key!r} from {(p, sym)!r}")
                targets.add(key)

    @property
    def tracks(self) -> int:
        return len(self.alphabets)

    @property
    def blank(self) -> Symbol:
        return (BLANK,) * self.tracks

    def symbols(self) -> Iterator[Symbol]:
        return product(*self.alphabets)

    def rules(self) -> Iterator[tuple[str, Symbol, Transition]]:
        for (p, sym), trs in self.delta.items():
            for t in trs:
                yield p, sym, t

    @cached_property
    def is_exact(self) -> bool:
        return all(isinstance(t.amp, ExactAmplitude) for _, _, t in self.rules())

    @cached_property
    def is_deterministic(self) -> bool:
        return all(len(trs) == 1 and is_one(trs[0].amp) for trs in self.delta.values())

    @cached_property
    def table(self) -> dict[tuple[str, Symbol], tuple[Symbol, str, int]]:
        """Deterministic view ``(p, sigma) -> (tau, q, d)``; only valid for DTMs."""
        if not self.is_deterministic:
            raise SpecError(f"{self.name or 'machine'} is not deterministic")
        return {k: (trs[0].write, trs[0].state, trs[0].move) for k, trs in self.delta.items()}

    def __len__(self) -> int:
        return sum(len(t) for t in self.delta.values())


@dataclass
class TableBuilder:
    """Accumulates rules; single-track symbols may be given as plain strings."""

    alphabets: Sequence[Sequence[str]]
    delta: dict = field(default_factory=dict)
    states: dict = field(default_factory=dict)  # insertion-ordered set

    def _sym(self, s: str | Sequence[str]) -> Symbol:
        return (s,) if isinstance(s, str) else tuple(s)

    def add(self, p: str, read, write, q: str, move: int, amp: Amplitude = ONE) -> None:
        key = (p, self._sym(read))
        self.states.setdefault(p, None)
        self.states.setdefault(q, None)
        self.delta.setdefault(key, []).append(Transition(self._sym(write), q, move, amp))

    def state(self, *names: str) -> None:
        for n in names:
            self.states.setdefault(n, None)

    def build(self, start: str, final: str, name: str = "") -> QTMSpec:
        self.state(start, final)
        return QTMSpec(
            states=tuple(self.states),
            alphabets=tuple(tuple(a) for a in self.alphabets),
            delta={k: tuple(v) for k, v in self.delta.items()},
            start=start,
            final=final,
            name=name,
        )


def with_normal_form(b: TableBuilder, start: str, final: str) -> None:
    """Add the ``qf, tau -> tau, q0, R`` rows."""
    for s in product(*b.alphabets):
        b.add(final, s, s, start, R)


# --------------------------------------------------------------------------
# tapes


@dataclass(frozen=True)
class TapeWindow:
    """Cells ``offset .. offset+len(cells)-1``; everything else is blank.

    Always trimmed, so equal tapes have equal windows.
    """

    offset: int
    cells: tuple[Symbol, ...]
    blank: Symbol

    @classmethod
    def make(cls, offset: int, cells: Sequence[Symbol], blank: Symbol) -> TapeWindow:
        lo, hi = 0, len(cells)
        while lo < hi and cells[lo] == blank:
            lo += 1
        while hi > lo and cells[hi - 1] == blank:
            hi -= 1
        if lo == hi:
            return cls(0, (), blank)
        return cls(offset + lo, tuple(cells[lo:hi]), blank)

    @classmethod
    def from_cells(cls, cells: Mapping[int, Symbol], blank: Symbol) -> TapeWindow:
        used = [i for i, s in cells.items() if s != blank]
        if not used:
            return cls(0, (), blank)
        lo, hi = min(used), max(used)
        return cls(lo, tuple(cells.get(i, blank) for i in range(lo, hi + 1)), blank)

    @classmethod
    def from_tracks(cls, *tracks: str | Sequence[str], k: int | None = None, offset: int = 0) -> TapeWindow:
        """Joint tape ``x1; x2; ...``, each track starting at ``offset``.

        A string track contributes one symbol per character.
        """
        k = k if k is not None else len(tracks)
        if len(tracks) > k:
            raise ValueError("more tracks than the machine has")
        cols = [list(t) for t in tracks] + [[] for _ in range(k - len(tracks))]
        n = max((len(c) for c in cols), default=0)
        blank = (BLANK,) * k
        cells = [tuple(c[i] if i < len(c) else BLANK for c in cols) for i in range(n)]
        return cls.make(offset, cells, blank)

    @property
    def end(self) -> int:
        return self.offset + len(self.cells)

    def __getitem__(self, i: int) -> Symbol:
        j = i - self.offset
        if 0 <= j < len(self.cells):
            return self.cells[j]
        return self.blank

    def write(self, i: int, s: Symbol) -> TapeWindow:
        if not self.cells:
            return TapeWindow.make(i, (s,), self.blank)
        lo = min(self.offset, i)
        hi = max(self.end, i + 1)
        cells = [self[m] for m in range(lo, hi)]
        cells[i - lo] = s
        return TapeWindow.make(lo, cells, self.blank)

    def cell_map(self) -> dict[int, Symbol]:
        return {self.offset + j: s for j, s in enumerate(self.cells) if s != self.blank}

    def track(self, t: int) -> dict[int, str]:
        """Non-blank symbols of track ``t`` by position."""
        return {self.offset + j: s[t] for j, s in enumerate(self.cells) if s[t] != BLANK}

    def track_string(self, t: int) -> str:
        """Track ``t`` read left to right with blanks dropped."""
        return "".join(s[t] for s in self.cells if s[t] != BLANK)

    def shifted(self, d: int) -> TapeWindow:
        return TapeWindow(self.offset + d, self.cells, self.blank) if self.cells else self

    def __str__(self) -> str:
        if not self.cells:
            return "<blank>"
        rows = [" ".join(s[t] for s in self.cells) for t in range(len(self.blank))]
        return f"@{self.offset}: " + " | ".join(rows)


# --------------------------------------------------------------------------
# text format

_SECTIONS = ("STATES", "TRACKS", "ALPHABETS", "START", "FINAL", "RULES")
_RULE = re.compile(r"^(\S+)\s*\(([^()]*)\)\s*->\s*\(([^()]*)\)\s*(\S+)\s+([LR])(?:\s+(\S+))?$")


def _symbols(text: str) -> Symbol:
    return tuple(t.strip() for t in text.split(","))


def parse_spec(text: str, name: str = "") -> QTMSpec:
    """Read the ``STATES / TRACKS / ALPHABETS / START / FINAL / RULES`` format."""
    states: list[str] = []
    tracks: int | None = None
    alphabets: list[tuple[str, ...]] = []
    start = final = None
    delta: dict = {}
    section = None
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("//", 1)[0].strip()
        if not line:
            continue
        head, _, rest = line.partition(" ")
        if head in _SECTIONS:
            section = head
            rest = rest.strip()
            if head == "TRACKS":
                try:
                    tracks = int(rest)
                except ValueError:
                    raise SpecError(f"line {lineno}: TRACKS needs an integer") from None
            elif head == "START":
                start = rest
            elif head == "FINAL":
                final = rest
            elif head == "STATES":
                states += rest.split()
            elif head == "ALPHABETS" and rest:
                alphabets += [tuple(a.split()) for a in rest.split("|")]
            continue
        if section == "STATES":
            states += line.split()
        elif section == "ALPHABETS":
            alphabets.append(tuple(line.split()))
        elif section == "RULES":
            m = _RULE.match(line)
            if not m:
                raise SpecError(f"line {lineno}: cannot parse rule {line!r}")
            p, read, write, q, d, amp = m.groups()
            try:
                a = parse_amplitude(amp) if amp else ONE
            except ValueError:
                raise SpecError(f"line {lineno}: bad amplitude {amp!r}") from None
            delta.setdefault((p, _symbols(read)), []).append(Transition(_symbols(write), q, parse_move(d), a))
        else:
            raise SpecError(f"line {lineno}: unexpected {line!r}")
    if start is None or final is None:
        raise SpecError("START and FINAL are required")
    if tracks is None:
        tracks = len(alphabets)
    if len(alphabets) != tracks:
        raise SpecError(f"TRACKS says {tracks} but {len(alphabets)} alphabets given")
    try:
        return QTMSpec(tuple(states), tuple(alphabets), {k: tuple(v) for k, v in delta.items()}, start, final, name)
    except SpecError:
        raise
    except (TypeError, KeyError) as exc:
        raise SpecError(str(exc)) from None


def format_spec(spec: QTMSpec) -> str:
    for q in spec.states:
        if not q or any(c in q for c in " ()\t"):
            raise SpecError(f"state name {q!r} cannot be written")
    out = [f"STATES {' '.join(spec.states)}", f"TRACKS {spec.tracks}", "ALPHABETS"]
    out += [" ".join(a) for a in spec.alphabets]
    out += [f"START {spec.start}", f"FINAL {spec.final}", "RULES"]
    for p, sym, t in spec.rules():
        amp = "" if is_one(t.amp) and isinstance(t.amp, ExactAmplitude) else " " + format_amplitude(t.amp)
        out.append(f"{p} ({','.join(sym)}) -> ({','.join(t.write)}) {t.state} {move_name(t.move)}{amp}")
    return "\n".join(out) + "\n"


def rename_states(spec: QTMSpec, f, name: str | None = None) -> QTMSpec:
    delta = {
        (f(p), s): tuple(Transition(t.write, f(t.state), t.move, t.amp) for t in trs)
        for (p, s), trs in spec.delta.items()
    }
    return QTMSpec(
        tuple(f(q) for q in spec.states), spec.alphabets, delta, f(spec.start), f(spec.final),
        spec.name if name is None else name,
    )


def fresh(base: str, taken: Iterable[str]) -> str:
    taken = set(taken)
    if base not in taken:
        return base
    n = 1
    while f"{base}{n}" in taken:
        n += 1
    return f"{base}{n}"
