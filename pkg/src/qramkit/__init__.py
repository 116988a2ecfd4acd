"""Quantum random-access machines, stored-program machines, quantum Turing machines and circuits."""
from .circuit import Circuit, Unitary, circuit_output_gap, parse_circuit_description, run_circuit
from .compilers import compile_qram_to_qrasp, compile_qrasp_to_qram
from .cost import CostModel
from .engine import RunReport, compare_distributions, enumerate_paths, sample
from .qram import QramProgram, format_qram, parse_qram
from .qrasp import QraspImage, assemble_qrasp, disassemble, parse_image
from .ring import ExactAmplitude, RealQ2
from .transforms import make_address_safe, postpone_measurements, shift_addresses

__version__ = "0.1.0"

__all__ = [
    "Circuit",
    "CostModel",
    "ExactAmplitude",
    "QraspImage",
    "QramProgram",
    "RealQ2",
    "RunReport",
    "Unitary",
    "assemble_qrasp",
    "circuit_output_gap",
    "compare_distributions",
    "compile_qram_to_qrasp",
    "compile_qrasp_to_qram",
    "disassemble",
    "enumerate_paths",
    "format_qram",
    "make_address_safe",
    "parse_circuit_description",
    "parse_image",
    "parse_qram",
    "postpone_measurements",
    "run_circuit",
    "sample",
    "shift_addresses",
]
