"""Random circuit generators shared by the tests."""

import numpy as np

from mcfe.circuit import AlternatingCircuit, Circuit, Gate, Layer


def random_u(q, rng):
    return Gate.u(q, *rng.uniform(-np.pi, np.pi, 3))


def random_layer(n, rng, kind=None):
    kind = kind or rng.choice(["l", "e", "mixed"])
    qubits = list(rng.permutation(n))
    gates = []
    if kind in ("e", "mixed") and n >= 2:
        pairs = rng.integers(1, n // 2 + 1)
        for _ in range(pairs):
            c, t = qubits.pop(), qubits.pop()
            gates.append(Gate.cnot(int(c), int(t)))
    if kind in ("l", "mixed"):
        for q in qubits:
            r = rng.random()
            if r < 0.4:
                gates.append(random_u(int(q), rng))
            elif r < 0.7:
                gates.append(Gate.c1(int(q), int(rng.integers(24))))
    return Layer(n, tuple(gates))


def random_circuit(n, depth, rng):
    return Circuit(n, tuple(random_layer(n, rng) for _ in range(depth)))


def random_alternating(n, num_l, rng):
    layers = []
    for i in range(2 * num_l - 1):
        layers.append(random_layer(n, rng, "l" if i % 2 == 0 else "e"))
    # "e" draws may come back empty when n < 2; force the declared kind
    return AlternatingCircuit(n, tuple(Layer(n, l.gates, "l" if i % 2 == 0 else "e")
                                       for i, l in enumerate(layers)))
