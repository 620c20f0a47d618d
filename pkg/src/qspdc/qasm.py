"""OpenQASM 2.0 subset: one ``qreg``, gates ``ry``, ``x``, ``cx``."""
from __future__ import annotations

import ast
import math
import operator
import re

from .circuit import CX, Circuit, Ry, X

HEADER = 'OPENQASM 2.0;\ninclude "qelib1.inc";\n'


class QasmError(ValueError):
    def __init__(self, message: str, line: int | None = None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line is not None else message)


def format_angle(a: float) -> str:
    """Shortest decimal that parses back to the same float."""
    return repr(float(a))


def to_qasm(c: Circuit) -> str:
    lines = [HEADER + f"qreg q[{c.n_qubits}];"]
    for g in c.gates:
        if isinstance(g, Ry):
            lines.append(f"ry({format_angle(g.angle)}) q[{g.target}];")
        elif isinstance(g, X):
            lines.append(f"x q[{g.target}];")
        elif isinstance(g, CX):
            if not g.positive:
                raise ValueError("negative-control CX: apply expand_negative_controls first")
            lines.append(f"cx q[{g.control}],q[{g.target}];")
        else:  # pragma: no cover
            raise TypeError(g)
    return "\n".join(lines) + "\n"


_BINOPS = {ast.Add: operator.add, ast.Sub: operator.sub, ast.Mult: operator.mul, ast.Div: operator.truediv}


def _eval_angle(expr: str, line: int) -> float:
    def ev(node):
        if isinstance(node, ast.Expression):
            return ev(node.body)
        if isinstance(node, ast.Constant) and isinstance(node.value, (int, float)):
            return float(node.value)
        if isinstance(node, ast.Name) and node.id == "pi":
            return math.pi
        if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.USub, ast.UAdd)):
            v = ev(node.operand)
            return -v if isinstance(node.op, ast.USub) else v
        if isinstance(node, ast.BinOp) and type(node.op) in _BINOPS:
            return _BINOPS[type(node.op)](ev(node.left), ev(node.right))
        raise QasmError(f"unsupported angle expression {expr!r}", line)

    try:
        return ev(ast.parse(expr, mode="eval"))
    except SyntaxError:
        raise QasmError(f"malformed angle expression {expr!r}", line) from None
    except ZeroDivisionError:
        raise QasmError(f"division by zero in {expr!r}", line) from None


_QARG = r"\s*([A-Za-z_]\w*)\s*\[\s*(\d+)\s*\]\s*"
_RE_QREG = re.compile(r"^qreg" + _QARG + r"$")
_RE_GATE = re.compile(r"^([A-Za-z_]\w*)\s*(?:\((.*)\))?\s+(.*)$")
_RE_ARG = re.compile(r"^" + _QARG + r"$")


def from_qasm(text: str) -> Circuit:
    # strip comments, keep line numbers for statements
    stmts: list[tuple[int, str]] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        *parts, tail = raw.split("//", 1)[0].split(";")
        if tail.strip():
            raise QasmError(f"missing ';' after {tail.strip()!r}", lineno)
        stmts += [(lineno, p.strip()) for p in parts]
    reg = None
    n = None
    gates = []
    saw_header = False
    for lineno, s in stmts:
        if not s:
            continue
        if s.startswith("OPENQASM"):
            if s.split()[-1] != "2.0":
                raise QasmError(f"unsupported version {s!r}", lineno)
            saw_header = True
            continue
        if s.startswith("include"):
            continue
        m = _RE_QREG.match(s)
        if m:
            if reg is not None:
                raise QasmError("only one qreg is supported", lineno)
            reg, n = m.group(1), int(m.group(2))
            continue
        if s.startswith(("creg", "barrier")):
            continue
        m = _RE_GATE.match(s)
        if not m:
            raise QasmError(f"cannot parse {s!r}", lineno)
        name, params, args = m.group(1), m.group(2), m.group(3)
        if reg is None:
            raise QasmError("gate before qreg declaration", lineno)
        qubits = []
        for a in args.split(","):
            am = _RE_ARG.match(a)
            if not am or am.group(1) != reg:
                raise QasmError(f"bad qubit argument {a.strip()!r}", lineno)
            q = int(am.group(2))
            if q >= n:
                raise QasmError(f"qubit {q} out of range for {reg}[{n}]", lineno)
            qubits.append(q)
        arity = {"ry": (1, True), "x": (1, False), "cx": (2, False)}
        if name not in arity:
            raise QasmError(f"unsupported gate {name!r}", lineno)
        nq, has_param = arity[name]
        if len(qubits) != nq or (params is not None) != has_param:
            raise QasmError(f"wrong arguments for {name}", lineno)
        if name == "ry":
            gates.append(Ry(qubits[0], _eval_angle(params, lineno)))
        elif name == "x":
            gates.append(X(qubits[0]))
        else:
            if qubits[0] == qubits[1]:
                raise QasmError("cx control equals target", lineno)
            gates.append(CX(qubits[0], qubits[1]))
    if not saw_header:
        raise QasmError("missing OPENQASM 2.0 header", 1)
    if reg is None:
        raise QasmError("no qreg declared")
    return Circuit(n, gates)
