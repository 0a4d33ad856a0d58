"""AST for measurement-protocol scripts, plus the canonical pretty-printer."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Union

from ..states import BellKind


@dataclass(frozen=True)
class Pos:
    line: int
    column: int


_NOWHERE = Pos(0, 0)


@dataclass(frozen=True)
class Axis:
    """A named axis (``"x"``, ``"y"``, ``"z"``) or a raw direction triple."""

    name: str | None = None
    vector: tuple[float, float, float] | None = None
    pos: Pos = field(default=_NOWHERE, compare=False)

    def __str__(self) -> str:
        if self.name is not None:
            return self.name
        return "(" + ",".join(repr(float(c)) for c in self.vector) + ")"


@dataclass(frozen=True)
class Prepare:
    source: str  # "singlet" | "bell" | "ket"
    labels: tuple[int, ...]
    bell: BellKind | None = None
    bits: str | None = None
    pos: Pos = field(default=_NOWHERE, compare=False)

    def __str__(self) -> str:
        pair = "(" + ",".join(map(str, self.labels)) + ")"
        if self.source == "singlet":
            return f"prepare singlet{pair};"
        if self.source == "bell":
            return f"prepare bell {_BELL_NAMES[self.bell]}{pair};"
        return f"prepare ket {self.bits}{pair};"


@dataclass(frozen=True)
class Measure:
    basis: str  # "spin" | "bell"
    targets: tuple[int, ...]
    axis: Axis | None = None
    pos: Pos = field(default=_NOWHERE, compare=False)

    def __str__(self) -> str:
        basis = f"spin({self.axis})" if self.basis == "spin" else "bell"
        if len(self.targets) == 1:
            targets = str(self.targets[0])
        else:
            targets = "(" + ",".join(map(str, self.targets)) + ")"
        return f"measure {basis} on {targets};"


@dataclass(frozen=True)
class Report:
    """``metric`` with its arguments.

    ``args`` layout per metric: probs ``()``; rdm ``(labels,)``;
    schmidt/entropy ``(labels_a, labels_b)``; concurrence ``(p, q)``;
    correlator ``(p, axis, q, axis)``.
    """

    metric: str
    args: tuple = ()
    pos: Pos = field(default=_NOWHERE, compare=False)

    def spec(self) -> str:
        a = self.args
        if self.metric == "probs":
            return "probs"
        if self.metric == "rdm":
            return f"rdm({_labels(a[0])})"
        if self.metric in ("schmidt", "entropy"):
            return f"{self.metric}({_labels(a[0])}|{_labels(a[1])})"
        if self.metric == "concurrence":
            return f"concurrence({a[0]},{a[1]})"
        return f"correlator({a[0]},{a[1]},{a[2]},{a[3]})"

    def __str__(self) -> str:
        return f"report {self.spec()};"


Statement = Union[Prepare, Measure, Report]


@dataclass(frozen=True)
class ProtocolProgram:
    statements: tuple[Statement, ...] = ()
    name: str = field(default="script", compare=False)

    def __str__(self) -> str:
        return "".join(str(s) + "\n" for s in self.statements)

    def __len__(self) -> int:
        return len(self.statements)


_BELL_NAMES = {
    BellKind.PSI_PLUS: "psi+",
    BellKind.PSI_MINUS: "psi-",
    BellKind.PHI_PLUS: "phi+",
    BellKind.PHI_MINUS: "phi-",
}


def _labels(labels) -> str:
    return ",".join(map(str, labels))


def format_program(program: ProtocolProgram) -> str:
    return str(program)
