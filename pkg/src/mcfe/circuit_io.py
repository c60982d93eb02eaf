"""Line-oriented circuit text format.

::

    # layers are applied top to bottom; qubits are 0-based
    CIRCUIT n=3
    L u(0;0.1,1.5707963267948966,-0.2) c1(2;7)
    E cnot(0,1)
    L

``L`` marks a single-qubit layer, ``E`` a CNOT layer and ``M`` a mixed layer.
Angles are written with 17 significant digits so they round-trip bit-exactly.
Mirror samples carry one extra comment line ``# kind=<k> seed=<u64> target=<bits>``.
"""

import re

from .circuit import Circuit, Gate, Layer

_KIND_TAGS = {"l": "L", "e": "E", "mixed": "M"}
_TAG_KINDS = {v: k for k, v in _KIND_TAGS.items()}
_HEADER = re.compile(r"CIRCUIT\s+n=(\d+)\s*$")
_GATE = re.compile(r"(\w+)\(([^)]*)\)")
_META = re.compile(r"#\s*kind=(\d)\s+seed=(\d+)\s+target=([01]*)\s*$")


class CircuitParseError(ValueError):
    def __init__(self, message, line, column):
        super().__init__(f"line {line}, column {column}: {message}")
        self.line = line
        self.column = column


def _fmt(x):
    return format(float(x), ".17g")


def format_gate(g):
    if g.kind == "u":
        return "u({};{})".format(g.qubits[0], ",".join(_fmt(a) for a in g.params))
    if g.kind == "c1":
        return f"c1({g.qubits[0]};{g.clifford})"
    return f"cnot({g.qubits[0]},{g.qubits[1]})"


def serialize(c, comments=()):
    lines = [f"# {text}" for text in comments]
    lines.append(f"CIRCUIT n={c.n}")
    for layer in c.layers:
        tag = _KIND_TAGS[layer.kind]
        lines.append(" ".join([tag] + [format_gate(g) for g in layer.gates]))
    return "\n".join(lines) + "\n"


def _parse_gate(name, args, lineno, col):
    try:
        if name == "u":
            q, angles = args.split(";")
            values = [float(a) for a in angles.split(",")]
            return Gate.u(int(q), *values)
        if name == "c1":
            q, cid = args.split(";")
            return Gate.c1(int(q), int(cid))
        if name == "cnot":
            ctrl, tgt = args.split(",")
            return Gate.cnot(int(ctrl), int(tgt))
    except (TypeError, ValueError) as exc:
        raise CircuitParseError(f"bad gate {name}({args}): {exc}", lineno, col) from None
    raise CircuitParseError(f"unknown gate {name!r}", lineno, col)


def _parse_layer(n, text, lineno):
    tag = text[0]
    if tag not in _TAG_KINDS or (len(text) > 1 and not text[1].isspace()):
        raise CircuitParseError(f"expected layer tag L, E or M, got {text.split()[0]!r}", lineno, 1)
    gates = []
    pos = 1
    while True:
        while pos < len(text) and text[pos].isspace():
            pos += 1
        if pos >= len(text):
            break
        m = _GATE.match(text, pos)
        if not m:
            raise CircuitParseError("malformed gate token", lineno, pos + 1)
        gates.append(_parse_gate(m.group(1), m.group(2), lineno, pos + 1))
        pos = m.end()
    try:
        return Layer(n, tuple(gates), _TAG_KINDS[tag])
    except ValueError as exc:
        raise CircuitParseError(str(exc), lineno, 1) from None


def parse(text):
    """Parse circuit text; returns ``(circuit, metadata)``.

    ``metadata`` is a dict with ``kind``, ``seed``, ``target`` when a mirror
    sample metadata line is present, else empty.
    """
    n = None
    layers = []
    meta = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            m = _META.match(line)
            if m:
                meta = {"kind": int(m.group(1)), "seed": int(m.group(2)), "target": m.group(3)}
            continue
        if n is None:
            m = _HEADER.match(line)
            if not m:
                raise CircuitParseError("expected header 'CIRCUIT n=<int>'", lineno, 1)
            n = int(m.group(1))
            continue
        layers.append(_parse_layer(n, line, lineno))
    if n is None:
        raise CircuitParseError("missing header", 1, 1)
    if meta and len(meta["target"]) != n:
        raise CircuitParseError("target width does not match circuit width", 1, 1)
    return Circuit(n, tuple(layers)), meta


def parse_circuit(text):
    return parse(text)[0]
