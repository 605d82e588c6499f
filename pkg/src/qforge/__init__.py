"""Build, simulate and unit-test quantum circuits."""
from .analysis import BlockCategory, Category, SliceSet, WireReduction, categorize, hslice, verify_recomposition, vslice
from .ir import (Circuit, CircuitError, GateKind, GateOp, GateStats, SourceSpan, add_gate, compose, count_ops,
                 gate_loc, inverse, strip_breakbarriers)
from .qasm import ParseError, parse, parse_file, serialize, write_file
from .sim import fidelity, qsphere, run, sample, unitary_of

__version__ = "0.1.0"

__all__ = [
    "BlockCategory", "Category", "SliceSet", "WireReduction", "categorize", "hslice",
    "verify_recomposition", "vslice",
    "Circuit", "CircuitError", "GateKind", "GateOp", "GateStats", "SourceSpan", "add_gate", "compose",
    "count_ops", "gate_loc", "inverse", "strip_breakbarriers",
    "ParseError", "parse", "parse_file", "serialize", "write_file",
    "fidelity", "qsphere", "run", "sample", "unitary_of",
]
