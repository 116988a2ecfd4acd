"""Quantum Turing machines and the reversible toolkit."""
from .builtins import BUILTIN_NAMES, builtin, copy_machine, invertible_pair, io_reversible, swap_machine
from .combinators import dovetail, dovetail_all, embed, reverse_rtm, with_history
from .model import BLANK, L, R, QTMSpec, SpecError, TableBuilder, TapeWindow, Transition, format_spec, parse_spec
from .run import (
    ExtractionError,
    QtmRunReport,
    Stuck,
    apply_machine,
    extract_output,
    initial_tape,
    run_deterministic,
    run_qtm,
)
from .validate import (
    WellFormedReport,
    backward_conflicts,
    complete,
    is_backward_deterministic,
    is_normal_form,
    is_reversible,
    is_stationary_on,
    is_unidirectional,
    validate_well_formed,
)

__all__ = [
    "BLANK",
    "BUILTIN_NAMES",
    "ExtractionError",
    "L",
    "QTMSpec",
    "QtmRunReport",
    "R",
    "SpecError",
    "Stuck",
    "TableBuilder",
    "TapeWindow",
    "Transition",
    "WellFormedReport",
    "apply_machine",
    "backward_conflicts",
    "builtin",
    "complete",
    "copy_machine",
    "dovetail",
    "dovetail_all",
    "embed",
    "extract_output",
    "format_spec",
    "initial_tape",
    "invertible_pair",
    "io_reversible",
    "is_backward_deterministic",
    "is_normal_form",
    "is_reversible",
    "is_stationary_on",
    "is_unidirectional",
    "parse_spec",
    "reverse_rtm",
    "run_deterministic",
    "run_qtm",
    "swap_machine",
    "validate_well_formed",
    "with_history",
]
