"""Text language for prepare/measure/report protocols (``.qproto`` files)."""
from .interpreter import InterpretError, ReportValue, interpret, monte_carlo
from .nodes import Axis, Measure, Pos, Prepare, ProtocolProgram, Report, format_program
from .parser import ParseError, parse, tokenize
from .validate import validate

__all__ = [
    "Axis",
    "InterpretError",
    "Measure",
    "ParseError",
    "Pos",
    "Prepare",
    "ProtocolProgram",
    "Report",
    "ReportValue",
    "format_program",
    "interpret",
    "load",
    "monte_carlo",
    "parse",
    "tokenize",
    "validate",
]


def load(source, name: str = "script") -> ProtocolProgram:
    """Parse and validate; raises the first :class:`ParseError` found."""
    program = parse(source, name)
    errors = validate(program)
    if errors:
        raise errors[0]
    return program
