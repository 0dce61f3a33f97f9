"""Reading and writing ``.dqasm`` files, plus a JSON form of the IR.

``.dqasm`` is OpenQASM 2 restricted to the package's gate alphabet, with
single-clbit conditionals ``if (c[i]==b) <gate>;`` and probabilistic gates
carried in comment annotations::

    // @prob begin qubits=0,1 p=0.5 writes=0:0
    // @prob branch p=0.5 writes=0:1
    x q[0];
    // @prob end

The ``begin`` line opens the first branch; every ``branch`` line opens the
next one. Branch bodies are ordinary gate statements, so third-party
OpenQASM tools must strip ``@prob`` blocks before loading a file.
"""

from __future__ import annotations

import ast
import math
import operator
import re
from dataclasses import dataclass
from typing import Any

from dyncirc.circuit import (
    Branch,
    Circuit,
    CircuitError,
    CondGate,
    Gate,
    Instruction,
    Measure,
    ProbGate,
    Reset,
)
from dyncirc.gates import ALPHABET

HEADER = 'OPENQASM 2.0;\ninclude "qelib1.inc";\n'
ALIASES = {"u3": "u", "cnot": "cx"}


@dataclass(frozen=True)
class SourceSpan:
    line: int
    column: int
    end_line: int
    end_column: int

    def __str__(self) -> str:
        return f"{self.line}:{self.column}"


class ParseError(ValueError):
    def __init__(self, message: str, span: SourceSpan | None = None):
        self.span = span
        self.message = message
        super().__init__(f"{span}: {message}" if span else message)


class UnsupportedGate(ParseError):
    pass


class WireError(ParseError):
    pass


def _fmt(x: float) -> str:
    return format(float(x), ".17g")


# --------------------------------------------------------------------------
# serialization


def _wire(q: int) -> str:
    return f"q[{q}]"


def _gate_stmt(g: Gate) -> str:
    args = ",".join(_wire(q) for q in g.qubits)
    if g.params:
        return f"{g.name}({','.join(_fmt(p) for p in g.params)}) {args};"
    return f"{g.name} {args};"


def _branch_meta(br: Branch) -> str:
    writes = ",".join(f"{c}:{b}" for c, b in br.writes)
    return f"p={_fmt(br.prob)} writes={writes}"


def serialize(circuit: Circuit) -> str:
    lines = [HEADER.rstrip("\n")]
    lines.append(f"qreg q[{circuit.n_qubits}];")
    if circuit.n_clbits:
        lines.append(f"creg c[{circuit.n_clbits}];")
    for ins in circuit.instructions:
        if isinstance(ins, Gate):
            lines.append(_gate_stmt(ins))
        elif isinstance(ins, Measure):
            lines.append(f"measure {_wire(ins.qubit)} -> c[{ins.clbit}];")
        elif isinstance(ins, Reset):
            lines.append(f"reset {_wire(ins.qubit)};")
        elif isinstance(ins, CondGate):
            lines.append(f"if(c[{ins.clbit}]=={ins.value}) {_gate_stmt(ins.gate)}")
        elif isinstance(ins, ProbGate):
            qubits = ",".join(str(q) for q in ins.qubits)
            first, *rest = ins.branches
            lines.append(f"// @prob begin qubits={qubits} {_branch_meta(first)}")
            lines.extend(_gate_stmt(g) for g in first.ops)
            for br in rest:
                lines.append(f"// @prob branch {_branch_meta(br)}")
                lines.extend(_gate_stmt(g) for g in br.ops)
            lines.append("// @prob end")
        else:  # pragma: no cover
            raise TypeError(f"unknown instruction {ins!r}")
    return "\n".join(lines) + "\n"


# --------------------------------------------------------------------------
# parsing

_BINOPS = {
    ast.Add: operator.add,
    ast.Sub: operator.sub,
    ast.Mult: operator.mul,
    ast.Div: operator.truediv,
    ast.Pow: operator.pow,
}


def _eval_param(text: str, span: SourceSpan) -> float:
    """Evaluate a numeric parameter: literals, ``pi`` and + - * / ** only."""
    try:
        tree = ast.parse(text.strip(), mode="eval")
    except (SyntaxError, ValueError) as exc:
        raise ParseError(f"bad parameter {text!r}", span) from exc

    def ev(node: ast.AST) -> float:
        if isinstance(node, ast.Expression):
            return ev(node.body)
        if isinstance(node, ast.Constant) and type(node.value) in (int, float):
            return float(node.value)
        if isinstance(node, ast.Name) and node.id == "pi":
            return math.pi
        if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.USub, ast.UAdd)):
            v = ev(node.operand)
            return -v if isinstance(node.op, ast.USub) else v
        if isinstance(node, ast.BinOp) and type(node.op) in _BINOPS:
            left, right = ev(node.left), ev(node.right)
            if isinstance(node.op, ast.Pow) and abs(right) > 64:
                raise ParseError("exponent too large", span)
            return float(_BINOPS[type(node.op)](left, right))
        raise ParseError(f"unsupported expression in parameter {text!r}", span)

    try:
        value = ev(tree)
    except (ZeroDivisionError, OverflowError, TypeError) as exc:
        raise ParseError(f"cannot evaluate parameter {text!r}", span) from exc
    if not math.isfinite(value):
        raise ParseError(f"non-finite parameter {text!r}", span)
    return value


@dataclass
class _Item:
    kind: str  # "stmt" or "comment"
    text: str
    span: SourceSpan


def _items(text: str) -> list[_Item]:
    items: list[_Item] = []
    line, col = 1, 1
    i, n = 0, len(text)
    buf: list[str] = []
    start: tuple[int, int] | None = None
    while i < n:
        ch = text[i]
        if ch == "/" and text.startswith("//", i):
            j = text.find("\n", i)
            j = n if j < 0 else j
            items.append(_Item("comment", text[i + 2 : j], SourceSpan(line, col, line, col + j - i)))
            col += j - i
            i = j
            continue
        if ch == ";":
            if start is None:
                raise ParseError("empty statement", SourceSpan(line, col, line, col))
            items.append(_Item("stmt", "".join(buf).strip(), SourceSpan(*start, line, col)))
            buf, start = [], None
        elif ch.isspace():
            if start is not None:
                buf.append(" ")
        else:
            if start is None:
                start = (line, col)
            buf.append(ch)
        if ch == "\n":
            line, col = line + 1, 1
        else:
            col += 1
        i += 1
    if start is not None:
        raise ParseError("missing ';' at end of statement", SourceSpan(*start, line, col))
    return items


_IDENT = r"[A-Za-z_][A-Za-z0-9_]*"
_REF = re.compile(rf"^({_IDENT})\s*\[\s*(\d+)\s*\]$")
_DECL = re.compile(rf"^(qreg|creg)\s+({_IDENT})\s*\[\s*(\d+)\s*\]$")
_MEASURE = re.compile(r"^measure\s+(.+?)\s*->\s*(.+)$")
_IF = re.compile(rf"^if\s*\(\s*({_IDENT})\s*(?:\[\s*(\d+)\s*\])?\s*==\s*(\d+)\s*\)\s*(.+)$")
_GATE = re.compile(rf"^({_IDENT})\s*(?:\((.*)\))?\s*(.*)$")
_PROB = re.compile(r"^\s*@prob\s+(begin|branch|end)\b(.*)$")


class _Parser:
    def __init__(self) -> None:
        self.qregs: dict[str, tuple[int, int]] = {}
        self.cregs: dict[str, tuple[int, int]] = {}
        self.nq = 0
        self.nc = 0
        self.instructions: list[Instruction] = []
        self.block: dict[str, Any] | None = None
        self.seen_header = False

    # -- helpers ---------------------------------------------------------
    def _ref(self, text: str, regs: dict[str, tuple[int, int]], what: str, span) -> int:
        m = _REF.match(text.strip())
        if not m:
            raise ParseError(f"expected {what} reference like name[i], got {text!r}", span)
        name, idx = m.group(1), int(m.group(2))
        if name not in regs:
            raise WireError(f"undeclared {what} register {name!r}", span)
        offset, size = regs[name]
        if idx >= size:
            raise WireError(f"{name}[{idx}] out of range (size {size})", span)
        return offset + idx

    def _qubit(self, text: str, span) -> int:
        return self._ref(text, self.qregs, "qubit", span)

    def _clbit(self, text: str, span) -> int:
        return self._ref(text, self.cregs, "clbit", span)

    def _gate(self, text: str, span) -> Gate:
        m = _GATE.match(text)
        if not m:
            raise ParseError(f"cannot parse statement {text!r}", span)
        name, ptext, args = m.group(1), m.group(2), m.group(3)
        name = ALIASES.get(name, name)
        if name not in ALPHABET:
            raise UnsupportedGate(f"unsupported gate {m.group(1)!r}", span)
        params = ()
        if ptext is not None and ptext.strip():
            params = tuple(_eval_param(p, span) for p in _split_params(ptext, span))
        if not args.strip():
            raise ParseError(f"gate {name} without operands", span)
        qubits = tuple(self._qubit(a, span) for a in args.split(","))
        try:
            return Gate(name, qubits, params)
        except (CircuitError, ValueError) as exc:
            raise ParseError(str(exc), span) from exc

    # -- dispatch --------------------------------------------------------
    def statement(self, text: str, span: SourceSpan) -> None:
        if text.startswith("OPENQASM"):
            if not re.fullmatch(r"OPENQASM\s+2(\.\d+)?", text):
                raise ParseError(f"unsupported version line {text!r}", span)
            if self.seen_header or self.instructions or self.qregs:
                raise ParseError("version line must come first", span)
            self.seen_header = True
            return
        if text.startswith("include"):
            if text.replace(" ", "") != 'include"qelib1.inc"':
                raise ParseError("only qelib1.inc may be included", span)
            return
        m = _DECL.match(text)
        if m:
            kind, name, size = m.group(1), m.group(2), int(m.group(3))
            if name in self.qregs or name in self.cregs:
                raise ParseError(f"register {name!r} declared twice", span)
            if kind == "qreg":
                self.qregs[name] = (self.nq, size)
                self.nq += size
            else:
                self.cregs[name] = (self.nc, size)
                self.nc += size
            return
        if text.startswith("barrier"):
            return
        if self.block is not None:
            self.block["branches"][-1]["ops"].append(self._gate(text, span))
            return
        m = _MEASURE.match(text)
        if m:
            self.instructions.append(
                Measure(self._qubit(m.group(1), span), self._clbit(m.group(2), span))
            )
            return
        if text.startswith("reset "):
            self.instructions.append(Reset(self._qubit(text[6:], span)))
            return
        m = _IF.match(text)
        if m:
            name, idx, value, body = m.group(1), m.group(2), int(m.group(3)), m.group(4)
            if idx is None:
                if name not in self.cregs or self.cregs[name][1] != 1:
                    raise ParseError("only single-clbit conditions are supported", span)
                clbit = self.cregs[name][0]
            else:
                clbit = self._clbit(f"{name}[{idx}]", span)
            if value not in (0, 1):
                raise ParseError("condition value must be 0 or 1", span)
            self.instructions.append(CondGate(clbit, value, self._gate(body, span)))
            return
        self.instructions.append(self._gate(text, span))

    def comment(self, text: str, span: SourceSpan) -> None:
        m = _PROB.match(text)
        if not m:
            return
        kind, rest = m.group(1), m.group(2)
        fields = _fields(rest, span)
        if kind == "begin":
            if self.block is not None:
                raise ParseError("nested @prob block", span)
            qubits = _int_list(fields.pop("qubits", None), span, "qubits")
            for q in qubits:
                if not 0 <= q < self.nq:
                    raise WireError(f"qubit {q} out of range", span)
            self.block = {"qubits": qubits, "span": span, "branches": [_branch_fields(fields, span)]}
        elif kind == "branch":
            if self.block is None:
                raise ParseError("@prob branch outside a block", span)
            self.block["branches"].append(_branch_fields(fields, span))
        else:
            if self.block is None:
                raise ParseError("@prob end without begin", span)
            if fields:
                raise ParseError("@prob end takes no fields", span)
            block, self.block = self.block, None
            try:
                branches = tuple(
                    Branch(tuple(b["ops"]), b["p"], tuple(b["writes"])) for b in block["branches"]
                )
                for br in branches:
                    for c, _ in br.writes:
                        if not 0 <= c < self.nc:
                            raise WireError(f"clbit {c} out of range", span)
                self.instructions.append(ProbGate(tuple(block["qubits"]), branches))
            except CircuitError as exc:
                raise ParseError(str(exc), span) from exc

    def finish(self) -> Circuit:
        if self.block is not None:
            raise ParseError("unterminated @prob block", self.block["span"])
        try:
            return Circuit(self.nq, self.nc, tuple(self.instructions))
        except CircuitError as exc:
            raise ParseError(str(exc)) from exc


def _split_params(text: str, span) -> list[str]:
    if text.count("(") != text.count(")"):
        raise ParseError("unbalanced parentheses in parameters", span)
    parts, depth, cur = [], 0, []
    for ch in text:
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        if ch == "," and depth == 0:
            parts.append("".join(cur))
            cur = []
        else:
            cur.append(ch)
    parts.append("".join(cur))
    return parts


def _fields(text: str, span) -> dict[str, str]:
    out: dict[str, str] = {}
    for tok in text.split():
        if "=" not in tok:
            raise ParseError(f"malformed @prob field {tok!r}", span)
        key, value = tok.split("=", 1)
        if key in out:
            raise ParseError(f"duplicate @prob field {key!r}", span)
        out[key] = value
    return out


def _int_list(text: str | None, span, what: str) -> list[int]:
    if text is None:
        raise ParseError(f"@prob begin needs {what}=", span)
    if not text:
        return []
    try:
        return [int(x) for x in text.split(",")]
    except ValueError as exc:
        raise ParseError(f"malformed {what} list {text!r}", span) from exc


def _branch_fields(fields: dict[str, str], span) -> dict[str, Any]:
    extra = set(fields) - {"p", "writes"}
    if extra or "p" not in fields:
        raise ParseError("@prob branch needs p= and optional writes=", span)
    try:
        p = float(fields["p"])
    except ValueError as exc:
        raise ParseError(f"bad probability {fields['p']!r}", span) from exc
    writes = []
    for tok in filter(None, fields.get("writes", "").split(",")):
        c, sep, b = tok.partition(":")
        if not sep or not c.isdigit() or b not in ("0", "1"):
            raise ParseError(f"malformed write {tok!r}", span)
        writes.append((int(c), int(b)))
    return {"p": p, "writes": writes, "ops": []}


def parse(text: str | bytes) -> Circuit:
    """Parse ``.dqasm`` text into a :class:`Circuit`.

    Raises:
        ParseError: on any malformed input (including undecodable bytes);
            :class:`UnsupportedGate` and :class:`WireError` are subclasses.
    """
    if isinstance(text, (bytes, bytearray)):
        try:
            text = bytes(text).decode("utf-8")
        except UnicodeDecodeError as exc:
            raise ParseError(f"input is not UTF-8: {exc}") from exc
    parser = _Parser()
    try:
        for item in _items(text):
            if item.kind == "comment":
                parser.comment(item.text, item.span)
            else:
                parser.statement(item.text, item.span)
        return parser.finish()
    except ParseError:
        raise
    except (ValueError, TypeError, KeyError, IndexError, OverflowError, RecursionError) as exc:
        raise ParseError(f"malformed input: {exc}") from exc


# --------------------------------------------------------------------------
# JSON form of the IR


def _gate_json(g: Gate) -> dict:
    return {"op": "gate", "name": g.name, "qubits": list(g.qubits), "params": list(g.params)}


def to_json(circuit: Circuit) -> dict:
    out = []
    for ins in circuit.instructions:
        if isinstance(ins, Gate):
            out.append(_gate_json(ins))
        elif isinstance(ins, Measure):
            out.append({"op": "measure", "qubit": ins.qubit, "clbit": ins.clbit})
        elif isinstance(ins, Reset):
            out.append({"op": "reset", "qubit": ins.qubit})
        elif isinstance(ins, CondGate):
            out.append(
                {"op": "cond", "clbit": ins.clbit, "value": ins.value, "gate": _gate_json(ins.gate)}
            )
        else:
            out.append(
                {
                    "op": "prob",
                    "qubits": list(ins.qubits),
                    "branches": [
                        {
                            "prob": br.prob,
                            "ops": [_gate_json(g) for g in br.ops],
                            "writes": [list(w) for w in br.writes],
                        }
                        for br in ins.branches
                    ],
                }
            )
    return {"n_qubits": circuit.n_qubits, "n_clbits": circuit.n_clbits, "instructions": out}


def _gate_from(d: dict) -> Gate:
    return Gate(d["name"], tuple(d["qubits"]), tuple(d.get("params", ())))


def from_json(data: dict) -> Circuit:
    ins: list[Instruction] = []
    for d in data["instructions"]:
        op = d["op"]
        if op == "gate":
            ins.append(_gate_from(d))
        elif op == "measure":
            ins.append(Measure(d["qubit"], d["clbit"]))
        elif op == "reset":
            ins.append(Reset(d["qubit"]))
        elif op == "cond":
            ins.append(CondGate(d["clbit"], d["value"], _gate_from(d["gate"])))
        elif op == "prob":
            branches = tuple(
                Branch(
                    tuple(_gate_from(g) for g in b["ops"]),
                    b["prob"],
                    tuple(tuple(w) for w in b["writes"]),
                )
                for b in d["branches"]
            )
            ins.append(ProbGate(tuple(d["qubits"]), branches))
        else:
            raise CircuitError(f"unknown op {op!r}")
    return Circuit(data["n_qubits"], data["n_clbits"], tuple(ins))
