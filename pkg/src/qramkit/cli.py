"""Command-line front end: ``qramkit run|compile|transform|validate|export|circuit``."""
from __future__ import annotations

import argparse
import sys
from dataclasses import dataclass, field
from itertools import product
from pathlib import Path
from typing import Sequence

from .circuit import CircuitError, parse_circuit_description, parse_description_text, parse_matrix_file, run_circuit
from .compilers import compile_qram_to_qrasp, compile_qrasp_to_qram
from .cost import CostModel
from .engine import IoAlphabet, compare_distributions, enumerate_paths, format_distribution, format_probability, sample
from .qram import QramProgram, format_qram, parse_qram
from .qrasp import QraspImage, assemble_qrasp, disassemble, format_image, parse_image
from .ring import RealQ2
from .transforms import make_address_safe, postpone_measurements, shift_addresses

EXIT_OK = 0
EXIT_PARSE = 1
EXIT_NOT_HALTED = 2
EXIT_MISMATCH = 3
EXIT_NOT_WELL_FORMED = 4

EXTENSIONS = (".qram", ".qrasp", ".qri", ".qtm")
TRANSFORMS = ("shift", "safe", "postpone")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # argparse exits with 2 on usage errors, which is taken by the halting check
    def error(self, message: str):
        self.print_usage(sys.stderr)
        self.exit(EXIT_PARSE, f"{self.prog}: error: {message}\n")


@dataclass
class CliConfig:
    subcommand: str
    paths: list[str] = field(default_factory=list)
    cost: CostModel = CostModel.LOGARITHMIC
    mode: str = "exact"
    max_steps: int = 1_000_000
    seed: int = 0
    shots: int | None = None
    alphabet_size: int = 2

    @classmethod
    def from_args(cls, ns: argparse.Namespace) -> CliConfig:
        paths = [p for p in (getattr(ns, "file", None),) if p]
        return cls(
            ns.command,
            paths,
            CostModel.parse(getattr(ns, "cost", "log")),
            getattr(ns, "mode", "exact"),
            getattr(ns, "max_steps", 1_000_000),
            getattr(ns, "seed", 0),
            getattr(ns, "shots", None),
            getattr(ns, "alphabet_size", 2),
        )

    @property
    def alphabet(self) -> IoAlphabet:
        return IoAlphabet.of_size(self.alphabet_size)


def load_machine(path: str) -> QramProgram | QraspImage:
    ext = Path(path).suffix
    text = Path(path).read_text(encoding="utf-8")
    if ext == ".qram":
        return parse_qram(text)
    if ext == ".qrasp":
        return assemble_qrasp(text)
    if ext == ".qri":
        return parse_image(text)
    raise UsageError(f"{path}: unknown extension {ext!r}; expected one of {', '.join(EXTENSIONS)}")


def load_qtm(path: str):
    from .qtm import parse_spec

    return parse_spec(Path(path).read_text(encoding="utf-8"), name=Path(path).stem)


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _split_inputs(values: Sequence[str] | None) -> list[str]:
    out: list[str] = []
    for v in values or ():
        out.extend(v.split(",") if "," in v else [v])
    return out


def _verify(src, tgt, inputs: list[str], cfg: CliConfig) -> int:
    status = EXIT_OK
    for x in inputs:
        a = enumerate_paths(src, x, cfg.cost, cfg.max_steps, cfg.alphabet, cfg.mode)
        b = enumerate_paths(tgt, x, cfg.cost, cfg.max_steps, cfg.alphabet, cfg.mode)
        same, gap = compare_distributions(a.distribution, b.distribution)
        if a.exceeded or b.exceeded:
            same = False
        print(f"# verify {x!r}: {'ok' if same else 'MISMATCH'} (gap {format_probability(gap)})", file=sys.stderr)
        if not same:
            status = EXIT_MISMATCH
    return status


# --------------------------------------------------------------------------
# subcommands


def cmd_run(ns: argparse.Namespace) -> int:
    cfg = CliConfig.from_args(ns)
    if Path(ns.file).suffix == ".qtm":
        return _run_qtm(ns, cfg)
    machine = load_machine(ns.file)
    if cfg.shots is not None:
        freqs = sample(machine, ns.input, cfg.cost, cfg.seed, cfg.shots, cfg.max_steps, cfg.alphabet, cfg.mode)
        sys.stdout.write("".join(f"{k}\t{v!r}\n" for k, v in freqs.items()))
        return EXIT_OK
    rep = enumerate_paths(machine, ns.input, cfg.cost, cfg.max_steps, cfg.alphabet, cfg.mode)
    sys.stdout.write(format_distribution(rep.distribution))
    if ns.stats:
        wc = "unbounded" if rep.exceeded else rep.worst_case_time
        print(f"# worst_case_time {wc}\n# paths {rep.path_count}\n# halted_mass {format_probability(rep.halted_mass)}")
    if rep.exceeded:
        deficit = 1 - rep.halted_mass
        print(f"warning: {format_probability(deficit)} of the mass did not halt within {cfg.max_steps} steps", file=sys.stderr)
        return EXIT_NOT_HALTED
    return EXIT_OK


def _run_qtm(ns: argparse.Namespace, cfg: CliConfig) -> int:
    from .qtm import run_qtm

    spec = load_qtm(ns.file)
    mode = cfg.mode if spec.is_exact or cfg.mode == "float" else "float"
    rep = run_qtm(spec, ns.input, max_time=cfg.max_steps, mode=mode)
    sys.stdout.write(format_distribution(rep.output_dist))
    if ns.stats:
        for t, p in rep.p.items():
            print(f"# p({t}) {format_probability(p)}")
    if not rep.halted:
        deficit = 1 - rep.halted_mass if isinstance(rep.halted_mass, RealQ2) else 1.0 - rep.halted_mass
        print(f"warning: {format_probability(deficit)} of the mass did not halt within {cfg.max_steps} steps", file=sys.stderr)
        return EXIT_NOT_HALTED
    return EXIT_OK


def cmd_compile(ns: argparse.Namespace) -> int:
    cfg = CliConfig.from_args(ns)
    src = load_machine(ns.file)
    if isinstance(src, QramProgram):
        tgt = compile_qram_to_qrasp(src)
        fmt = disassemble if (ns.output or "").endswith(".qrasp") else format_image
        _emit(fmt(tgt), ns.output)
    else:
        tgt = compile_qrasp_to_qram(src)
        _emit(format_qram(tgt), ns.output)
    return _verify(src, tgt, _split_inputs(ns.verify), cfg)


def cmd_transform(ns: argparse.Namespace) -> int:
    cfg = CliConfig.from_args(ns)
    if ns.name not in TRANSFORMS:
        raise UsageError(f"unknown transform {ns.name!r}; choose from {', '.join(TRANSFORMS)}")
    src = load_machine(ns.file)
    if not isinstance(src, QramProgram):
        raise UsageError("transforms apply to QRAM assembly (.qram)")
    if ns.name == "shift":
        if ns.k is None or ns.k < 1:
            raise UsageError("shift needs --k >= 1")
        tgt = shift_addresses(src, ns.k)
    elif ns.name == "safe":
        tgt = make_address_safe(src)
    else:
        tgt = postpone_measurements(src)
    _emit(format_qram(tgt), ns.output)
    inputs = _split_inputs(ns.verify)
    status = _verify(src, tgt, inputs, cfg)
    if ns.check:
        for x in inputs or [""]:
            if ns.name == "shift":
                rep = enumerate_paths(tgt, x, cfg.cost, cfg.max_steps, cfg.alphabet, cfg.mode, watch=range(1, ns.k + 1))
                hits = rep.watch_hits
            elif ns.name == "postpone":
                rep = enumerate_paths(tgt, x, cfg.cost, cfg.max_steps, cfg.alphabet, cfg.mode, track_measured=True)
                hits = rep.measured_hits
            else:
                rep = enumerate_paths(tgt, x, cfg.cost, cfg.max_steps, cfg.alphabet, cfg.mode)
                hits = rep.invalid_halts
            print(f"# check {x!r}: {hits} forbidden access(es)", file=sys.stderr)
            if hits:
                status = EXIT_MISMATCH
    return status


def _stationary(spec, max_len: int = 3) -> bool | None:
    from .qtm import Stuck, is_stationary_on

    syms = [s for s in spec.alphabets[0] if s != spec.blank[0]]
    inputs = ["".join(p) for n in range(max_len + 1) for p in product(syms, repeat=n)]
    try:
        return is_stationary_on(spec, inputs, max_time=10_000)
    except (Stuck, TimeoutError, ValueError):
        return None


def cmd_validate(ns: argparse.Namespace) -> int:
    from .qtm import is_backward_deterministic, is_normal_form, is_unidirectional, validate_well_formed

    if ns.window < 3:
        raise UsageError("--window must be at least 3")
    spec = load_qtm(ns.file)
    rep = validate_well_formed(spec, window=ns.window, method=ns.method)
    stat = _stationary(spec)
    print(f"defect\t{rep.defect!r}")
    print(f"well_formed\t{rep.ok}")
    print(f"method\t{rep.method}")
    print(f"columns\t{rep.columns}")
    print(f"normal_form\t{is_normal_form(spec)}")
    print(f"unidirectional\t{is_unidirectional(spec)}")
    print(f"backward_deterministic\t{is_backward_deterministic(spec) if spec.is_deterministic else 'n/a'}")
    print(f"stationary\t{'unknown' if stat is None else stat}")
    return EXIT_OK if rep.ok else EXIT_NOT_WELL_FORMED


def cmd_export(ns: argparse.Namespace) -> int:
    from .qtm import BUILTIN_NAMES, builtin, format_spec

    if ns.name not in BUILTIN_NAMES:
        raise UsageError(f"unknown builtin {ns.name!r}; choose from {', '.join(BUILTIN_NAMES)}")
    _emit(format_spec(builtin(ns.name)), ns.output)
    return EXIT_OK


def cmd_circuit(ns: argparse.Namespace) -> int:
    unitaries = parse_matrix_file(Path(ns.matrices).read_text(encoding="utf-8"))
    ints = parse_description_text(Path(ns.file).read_text(encoding="utf-8"))
    c = parse_circuit_description(ints, unitaries)
    mode = "exact" if ns.mode == "exact" and c.is_exact else "float"
    sys.stdout.write(format_distribution(run_circuit(c, ns.input, mode)))
    return EXIT_OK


# --------------------------------------------------------------------------


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--cost", default="log", choices=["log", "logarithmic", "const", "constant"], help="cost criterion")
    p.add_argument("--mode", default="exact", choices=["exact", "float"])
    p.add_argument("--max-steps", type=int, default=1_000_000)
    p.add_argument("--alphabet-size", type=int, default=2)


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="qramkit", description="Quantum RAM, RASP and Turing machine toolchain.")
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("run", help="enumerate or sample the output distribution")
    p.add_argument("file")
    p.add_argument("input", nargs="?", default="")
    _common(p)
    p.add_argument("--shots", type=int)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--stats", action="store_true", help="append '#' lines with time and path statistics")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("compile", help="QRAM to QRASP or QRASP to QRAM")
    p.add_argument("file")
    p.add_argument("-o", "--output")
    p.add_argument("--verify", action="append", metavar="INPUTS", help="comma-separated inputs to re-enumerate")
    _common(p)
    p.set_defaults(func=cmd_compile)

    p = sub.add_parser("transform", help="apply a QRAM rewrite")
    p.add_argument("file")
    p.add_argument("name")
    p.add_argument("--k", type=int)
    p.add_argument("-o", "--output")
    p.add_argument("--verify", action="append", metavar="INPUTS")
    p.add_argument("--check", action="store_true", help="run the dynamic checker for the transform")
    _common(p)
    p.set_defaults(func=cmd_transform)

    p = sub.add_parser("validate", help="well-formedness report for a QTM")
    p.add_argument("file")
    p.add_argument("--window", type=int, default=6)
    p.add_argument("--method", default="auto", choices=["auto", "matrix", "local"])
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("export", help="write a builtin toolkit machine")
    p.add_argument("name")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_export)

    p = sub.add_parser("circuit", help="output distribution of a described circuit")
    p.add_argument("file", help="integer description")
    p.add_argument("matrices", help="gate matrix file")
    p.add_argument("input", nargs="?", default="")
    p.add_argument("--mode", default="exact", choices=["exact", "float"])
    p.set_defaults(func=cmd_circuit)
    return ap


def main(argv: Sequence[str] | None = None) -> int:
    ap = build_parser()
    ns = ap.parse_args(argv)
    try:
        return ns.func(ns)
    except UsageError as exc:
        print(f"qramkit: error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except (OSError, ValueError, CircuitError) as exc:
        print(f"qramkit: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_PARSE


if __name__ == "__main__":
    sys.exit(main())
