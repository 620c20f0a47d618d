import math

import pytest
from hypothesis import given

from qspdc.circuit import CX, Circuit, Ry
from qspdc.qasm import QasmError, format_angle, from_qasm, to_qasm
from strategies import circuits

HDR = 'OPENQASM 2.0;\ninclude "qelib1.inc";\n'


def test_emits_expected_text():
    c = Circuit(2, [Ry(0, math.pi / 2), CX(0, 1)])
    assert to_qasm(c) == HDR + "qreg q[2];\nry(1.5707963267948966) q[0];\ncx q[0],q[1];\n"


@given(circuits(max_n=5, max_gates=15, positive_only=True))
def test_round_trip(c):
    back = from_qasm(to_qasm(c))
    assert back.n_qubits == c.n_qubits
    assert len(back.gates) == len(c.gates)
    for a, b in zip(back.gates, c.gates):
        assert a == b


def test_pi_expressions_and_comments():
    text = HDR + "qreg q[3];\ncreg c[3];\nry(pi/4) q[0]; // comment\nry(-2*pi/3) q[1];\nx q[2];\nbarrier q;\ncx q[0], q[2];\n"
    c = from_qasm(text)
    assert c.n_qubits == 3
    assert c.gates[0] == Ry(0, math.pi / 4)
    assert math.isclose(c.gates[1].angle, -2 * math.pi / 3)
    assert c.gates[-1] == CX(0, 2)


def test_several_statements_per_line():
    c = from_qasm(HDR + "qreg q[2]; ry(0.5) q[0]; cx q[0],q[1];\n")
    assert len(c.gates) == 2


@pytest.mark.parametrize(
    "body, line",
    [
        ("qreg q[2];\nh q[0];\n", 4),
        ("qreg q[2];\nry(0.1) q[5];\n", 4),
        ("qreg q[2];\nry(0.1) q[0]\n", 4),
        ("qreg q[2];\nry(__import__('os')) q[0];\n", 4),
        ("qreg q[2];\ncx q[1],q[1];\n", 4),
        ("ry(0.1) q[0];\n", 3),
    ],
)
def test_errors_carry_line_numbers(body, line):
    with pytest.raises(QasmError) as e:
        from_qasm(HDR + body)
    assert e.value.line == line


def test_header_required():
    with pytest.raises(QasmError):
        from_qasm("qreg q[1];\n")


def test_negative_controls_refused():
    with pytest.raises(ValueError):
        to_qasm(Circuit(2, [CX(0, 1, positive=False)]))


def test_format_angle_is_short_for_simple_values():
    assert format_angle(0.5) == "0.5"
