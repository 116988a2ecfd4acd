"""Path enumeration, sampling and distribution comparison for QRAMs and QRASPs."""
from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Iterable, Sequence, Union

from .cost import CostModel
from .qram import Monitor, QramProgram, RunState, exec_qram
from .qrasp import QraspImage, exec_qrasp
from .qstate import FLOAT_TOL, Probability, QState, arith, get_mode
from .ring import RealQ2, format_real, parse_real

Machine = Union[QramProgram, QraspImage]
Distribution = dict  # output string -> Probability
BOTTOM = "⊥"


@dataclass(frozen=True)
class IoAlphabet:
    symbols: tuple[str, ...] = ("0", "1")

    def __post_init__(self) -> None:
        if len(self.symbols) < 2:
            raise ValueError("alphabet needs at least two symbols")
        if len(set(self.symbols)) != len(self.symbols):
            raise ValueError("duplicate alphabet symbols")

    @classmethod
    def of_size(cls, m: int) -> IoAlphabet:
        if m <= 10:
            return cls(tuple(str(i) for i in range(m)))
        return cls(tuple(chr(ord("a") + i) for i in range(m)))

    @property
    def size(self) -> int:
        return len(self.symbols)


BINARY = IoAlphabet()


def encode_input(s: str | Sequence[str], alphabet: IoAlphabet = BINARY) -> tuple[int, ...]:
    """Symbol indices of ``s``; every read past the end yields -1."""
    index = {c: i for i, c in enumerate(alphabet.symbols)}
    try:
        return tuple(index[c] for c in s)
    except KeyError as exc:
        raise ValueError(f"symbol {exc.args[0]!r} not in alphabet") from None


def decode_output(ints: Iterable[int], alphabet: IoAlphabet = BINARY) -> str:
    m = alphabet.size
    syms = alphabet.symbols
    return "".join(syms[n] if 0 <= n < m - 1 else syms[m - 1] for n in ints)


@dataclass
class RunReport:
    distribution: Distribution
    worst_case_time: int | None  # None: some path was cut off at max_steps
    path_count: int
    halted_mass: Probability
    max_path_steps: int = 0
    watch_hits: int = 0
    measured_hits: int = 0
    invalid_halts: int = 0
    mode: str = "exact"
    raw_outputs: dict = field(default_factory=dict)

    @property
    def exceeded(self) -> bool:
        return self.worst_case_time is None

    def total(self) -> Probability:
        ar = arith(self.mode)
        t = ar.prob_zero
        for p in self.distribution.values():
            t = t + p
        return t


def _initial(machine: Machine, inputs: tuple[int, ...], mode: str, mon: Monitor | None) -> RunState:
    psi = QState.zero(mode)
    if isinstance(machine, QraspImage):
        return RunState(0, machine.memory(), psi, inputs, mon=mon)
    return RunState(0, {}, psi, inputs, mon=mon)


def _stepper(machine: Machine, model: CostModel):
    if isinstance(machine, QraspImage):
        return lambda st: exec_qrasp(st, model)
    if isinstance(machine, QramProgram):
        return lambda st: exec_qram(st, machine, model)
    raise TypeError(f"not a machine: {type(machine).__name__}")


def _inputs(inp, alphabet: IoAlphabet) -> tuple[int, ...]:
    if isinstance(inp, str):
        return encode_input(inp, alphabet)
    return tuple(int(v) for v in inp)


def enumerate_paths(
    machine: Machine,
    inp: str | Sequence[int] = "",
    model: CostModel = CostModel.LOGARITHMIC,
    max_steps: int = 1_000_000,
    alphabet: IoAlphabet = BINARY,
    mode: str | None = None,
    watch: Iterable[int] = (),
    track_measured: bool = False,
) -> RunReport:
    """Depth-first expansion of every positive-probability execution path.

    ``max_steps`` bounds the number of transitions on each path; paths still
    running at the bound contribute to ``1 - halted_mass``.
    """
    if max_steps < 0:
        raise ValueError("max_steps must be non-negative")
    mode = mode or get_mode()
    ar = arith(mode)
    step = _stepper(machine, model)
    watch = frozenset(watch)
    mon = Monitor(watch=watch, track_measured=track_measured) if (watch or track_measured) else None
    mon0 = mon if mon is not None else Monitor()
    st0 = _initial(machine, _inputs(inp, alphabet), mode, mon0)

    dist: Distribution = {}
    raw: dict = {}
    halted = ar.prob_zero
    worst = 0
    exceeded = False
    paths = 0
    max_steps_seen = 0
    totals = Monitor()
    stack: list[tuple[Probability, int, int, RunState]] = [(ar.prob_one, 0, 0, st0)]
    while stack:
        prob, time, steps, st = stack.pop()
        while st.ic is not None and steps < max_steps:
            branches = step(st)
            steps += 1
            if len(branches) == 1:
                _, t, st = branches[0]
                time += t
                continue
            # depth-first with the 0-branch explored first
            for p, t, s in reversed(branches[1:]):
                stack.append((prob * p, time + t, steps, s))
            p, t, st = branches[0]
            prob = prob * p
            time += t
        paths += 1
        max_steps_seen = max(max_steps_seen, steps)
        m = st.mon
        totals.watch_hits += m.watch_hits
        totals.measured_hits += m.measured_hits
        totals.invalid_halts += m.invalid_halts
        if st.ic is not None:
            exceeded = True
            continue
        halted = halted + prob
        worst = max(worst, time)
        key = decode_output(st.out, alphabet)
        dist[key] = dist[key] + prob if key in dist else prob
        rk = tuple(st.out)
        raw[rk] = raw[rk] + prob if rk in raw else prob
    return RunReport(
        distribution=dict(sorted(dist.items())),
        worst_case_time=None if exceeded else worst,
        path_count=paths,
        halted_mass=halted,
        max_path_steps=max_steps_seen,
        watch_hits=totals.watch_hits,
        measured_hits=totals.measured_hits,
        invalid_halts=totals.invalid_halts,
        mode=mode,
        raw_outputs=raw,
    )


def sample(
    machine: Machine,
    inp: str | Sequence[int] = "",
    model: CostModel = CostModel.LOGARITHMIC,
    seed: int = 0,
    shots: int = 1000,
    max_steps: int = 1_000_000,
    alphabet: IoAlphabet = BINARY,
    mode: str | None = None,
) -> dict[str, float]:
    """Empirical output frequencies from ``shots`` seeded runs; cut-off runs go to ``"⊥"``."""
    if shots < 1:
        raise ValueError("shots must be at least 1")
    mode = mode or get_mode()
    rng = random.Random(seed)
    step = _stepper(machine, model)
    inputs = _inputs(inp, alphabet)
    counts: dict[str, int] = {}
    for _ in range(shots):
        st = _initial(machine, inputs, mode, None)
        steps = 0
        while st.ic is not None and steps < max_steps:
            branches = step(st)
            steps += 1
            if len(branches) == 1:
                st = branches[0][2]
                continue
            r = rng.random()
            acc = 0.0
            st = branches[-1][2]
            for p, _, s in branches:
                acc += float(p)
                if r < acc:
                    st = s
                    break
        key = BOTTOM if st.ic is not None else decode_output(st.out, alphabet)
        counts[key] = counts.get(key, 0) + 1
    return {k: counts[k] / shots for k in sorted(counts)}


def compare_distributions(a: Distribution, b: Distribution, tol: float = FLOAT_TOL) -> tuple[bool, Probability]:
    """Exact equality when both sides hold exact reals, else max gap <= ``tol``."""
    exact = all(isinstance(v, RealQ2) for v in (*a.values(), *b.values()))
    if exact:
        zero = RealQ2(0)
        gap = zero
        for k in set(a) | set(b):
            d = a.get(k, zero) - b.get(k, zero)
            if d.sign() < 0:
                d = -d
            if d > gap:
                gap = d
        return gap.is_zero(), gap
    gap = max((abs(float(a.get(k, 0)) - float(b.get(k, 0))) for k in set(a) | set(b)), default=0.0)
    return gap <= tol, gap


def format_probability(p: Probability) -> str:
    if isinstance(p, RealQ2):
        return format_real(p)
    return f"{float(p):.17g}"


def format_distribution(dist: Distribution) -> str:
    return "".join(f"{k}\t{format_probability(v)}\n" for k, v in sorted(dist.items()))


def parse_distribution(text: str) -> Distribution:
    out: Distribution = {}
    for line in text.splitlines():
        if not line.strip() or line.startswith("#"):
            continue
        key, _, val = line.partition("\t")
        try:
            out[key] = parse_real(val.strip())
        except ValueError:
            out[key] = float(val)
    return out
