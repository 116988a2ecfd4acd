"""Superposition simulation under the measure-each-step halting scheme."""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from ..qstate import Probability, arith
from ..ring import RealQ2
from .model import BLANK, QTMSpec, SpecError, Symbol, TapeWindow

Config = tuple[str, TapeWindow, int]


class ExtractionError(ValueError):
    pass


class Stuck(RuntimeError):
    """A deterministic run reached a state/symbol pair with no transition."""


def extract_output(tape: TapeWindow, track: int = 1) -> str:
    """Concatenate the non-blank symbols of ``track`` left to right; must be bits."""
    if not 0 <= track < len(tape.blank):
        raise ExtractionError(f"tape has no track {track + 1}")
    y = tape.track_string(track)
    bad = set(y) - {"0", "1"}
    if bad:
        raise ExtractionError(f"non-binary output symbol(s) {sorted(bad)}")
    return y


def initial_tape(spec: QTMSpec, x: str | Sequence[str] = "") -> TapeWindow:
    """``x`` on the first track, every other track empty."""
    alpha = set(spec.alphabets[0])
    for c in x:
        if c not in alpha or c == BLANK:
            raise SpecError(f"input symbol {c!r} not in the first track alphabet")
    return TapeWindow.from_tracks(x, k=spec.tracks)


@dataclass
class QtmRunReport:
    p: dict[int, Probability]
    final_tapes: dict[TapeWindow, Probability]
    head_positions: dict[int, Probability]
    halted_mass: Probability
    stuck_mass: Probability
    steps: int
    mode: str
    output_track: int = 1
    pending: dict = field(default_factory=dict, repr=False)

    @property
    def output_dist(self) -> dict[str, Probability]:
        out: dict[str, Probability] = {}
        for tape, pr in self.final_tapes.items():
            y = extract_output(tape, self.output_track)
            out[y] = out[y] + pr if y in out else pr
        return dict(sorted(out.items()))

    @property
    def halt_time(self) -> int | None:
        """The unique halting time, if all halted mass sits at one ``t``."""
        return next(iter(self.p)) if len(self.p) == 1 else None

    @property
    def halted(self) -> bool:
        return _is_one(self.halted_mass)

    @property
    def final_tape(self) -> TapeWindow:
        if len(self.final_tapes) != 1:
            raise ValueError("halting tape is not unique")
        return next(iter(self.final_tapes))


def _is_one(p: Probability) -> bool:
    if isinstance(p, RealQ2):
        return p == RealQ2(1)
    return abs(p - 1.0) < 1e-9


def _add(d: dict, k, v) -> None:
    d[k] = d[k] + v if k in d else v


def step(spec: QTMSpec, sup: dict[Config, object], mode: str) -> tuple[dict[Config, object], Probability]:
    """Apply ``U`` once; returns the new superposition and the mass lost to undefined transitions."""
    ar = arith(mode)
    out: dict[Config, object] = {}
    lost = ar.prob_zero
    delta = spec.delta
    for (q, tape, h), a in sup.items():
        trs = delta.get((q, tape[h]))
        if not trs:
            lost = lost + ar.norm_sq(a)
            continue
        for t in trs:
            amp = t.amp if mode == "exact" else complex(t.amp)
            key = (t.state, tape.write(h, t.write), h + t.move)
            _add(out, key, a * amp)
    return {k: v for k, v in out.items() if not ar.is_zero(v)}, lost


def run_qtm(
    spec: QTMSpec,
    x: str | Sequence[str] = "",
    max_time: int = 10_000,
    tol: float = 0.0,
    mode: str | None = None,
    tape: TapeWindow | None = None,
    head: int = 0,
    output_track: int | None = None,
) -> QtmRunReport:
    """Iterate ``U`` and split off the ``q_f`` component after every step.

    Halted components are kept as a weighted set of (tape, head) outcomes,
    i.e. the mixed state summed over halting times.
    """
    if mode is None:
        mode = "exact" if spec.is_exact else "float"
    if mode == "exact" and not spec.is_exact:
        raise ValueError("exact mode needs ring amplitudes")
    ar = arith(mode)
    tape = tape if tape is not None else initial_tape(spec, x)
    if tape.blank != spec.blank:
        raise SpecError("tape track count does not match the machine")
    if output_track is None:
        output_track = 1 if spec.tracks > 1 else 0
    sup: dict[Config, object] = {(spec.start, tape, head): ar.one}
    target = RealQ2(1) - RealQ2(Fraction(tol)) if mode == "exact" else 1.0 - tol
    p: dict[int, Probability] = {}
    tapes: dict[TapeWindow, Probability] = {}
    heads: dict[int, Probability] = {}
    halted = ar.prob_zero
    lost = ar.prob_zero
    t = 0
    while sup and t < max_time and halted < target:
        sup, dl = step(spec, sup, mode)
        lost = lost + dl
        t += 1
        pt = ar.prob_zero
        rest = {}
        for c, a in sup.items():
            if c[0] == spec.final:
                w = ar.norm_sq(a)
                pt = pt + w
                _add(tapes, c[1], w)
                _add(heads, c[2], w)
            else:
                rest[c] = a
        sup = rest
        if not ar.prob_is_zero(pt):
            p[t] = pt
            halted = halted + pt
    return QtmRunReport(p, tapes, heads, halted, lost, t, mode, output_track, sup)


@dataclass
class DetRun:
    time: int
    tape: TapeWindow
    head: int
    trace: list[int] | None = None


def run_deterministic(
    spec: QTMSpec,
    tape: TapeWindow | None = None,
    x: str | Sequence[str] = "",
    head: int = 0,
    max_steps: int = 10_000_000,
    trace: bool = False,
) -> DetRun:
    """Fast path for 0/1 machines: a single configuration, no amplitudes.

    Raises :class:`Stuck` on an undefined transition and ``TimeoutError``
    when ``max_steps`` is reached without halting.
    """
    table = spec.table
    blank = spec.blank
    if tape is None:
        tape = initial_tape(spec, x)
    cells: dict[int, Symbol] = tape.cell_map()
    q, final = spec.start, spec.final
    h = head
    t = 0
    path = [h] if trace else None
    get = cells.get
    while True:
        if t >= max_steps:
            raise TimeoutError(f"no halt within {max_steps} steps")
        try:
            w, q, d = table[(q, get(h, blank))]
        except KeyError:
            raise Stuck(f"no transition for ({q}, {get(h, blank)}) at t={t}, head={h}") from None
        cells[h] = w
        h += d
        t += 1
        if path is not None:
            path.append(h)
        if q == final:
            return DetRun(t, TapeWindow.from_cells(cells, blank), h, path)


def apply_machine(spec: QTMSpec, *tracks: str | Sequence[str], max_steps: int = 10_000_000) -> DetRun:
    """Run a DTM on the joint tape ``tracks[0]; tracks[1]; ...`` from head 0."""
    return run_deterministic(spec, TapeWindow.from_tracks(*tracks, k=spec.tracks), max_steps=max_steps)


