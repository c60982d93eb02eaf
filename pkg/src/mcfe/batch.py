"""Structure-sharing batches of circuits.

All circuits in a ``CircuitBatch`` have identical layer structure (the same
qubits carry single-qubit gates in each layer, the same CNOTs, the same gate
kinds); only single-qubit angles and Clifford ids vary per member. Mirror
ensembles are built and simulated in this form.
"""

from dataclasses import dataclass
from typing import List, Tuple

import numpy as np

from . import cliffords
from .circuit import Circuit, Gate, Layer


@dataclass
class LayerBatch:
    kind: str
    qubits: Tuple[int, ...]
    angles: np.ndarray  # (B, len(qubits), 3) executed (psi, phi, theta)
    clifford_ids: np.ndarray  # (B, len(qubits)); -1 marks a u gate
    pairs: Tuple[Tuple[int, int], ...] = ()

    @property
    def size(self):
        return self.angles.shape[0]

    def take(self, index):
        return LayerBatch(
            self.kind, self.qubits, self.angles[index], self.clifford_ids[index], self.pairs
        )

    def layer(self, n, b):
        gates = []
        for j, q in enumerate(self.qubits):
            cid = int(self.clifford_ids[b, j])
            if cid >= 0:
                gates.append(Gate.c1(q, cid))
            else:
                gates.append(Gate.u(q, *self.angles[b, j]))
        gates.extend(Gate.cnot(c, t) for c, t in self.pairs)
        return Layer(n, tuple(gates), self.kind)


def layer_batch_from_layer(layer, size=1):
    singles = [g for g in layer.gates if g.is_single_qubit]
    qubits = tuple(g.qubits[0] for g in singles)
    angles = np.array([g.physical_angles() for g in singles], dtype=float).reshape(1, len(singles), 3)
    ids = np.array([g.clifford if g.kind == "c1" else -1 for g in singles], dtype=np.int64).reshape(1, -1)
    pairs = tuple(g.qubits for g in layer.gates if g.kind == "cnot")
    return LayerBatch(
        layer.kind, qubits, np.repeat(angles, size, axis=0), np.repeat(ids, size, axis=0), pairs
    )


def clifford_layer_batch(qubits, ids, kind="l"):
    """Layer batch of Clifford gates from an id array of shape (B, len(qubits))."""
    ids = np.asarray(ids, dtype=np.int64)
    return LayerBatch(kind, tuple(qubits), cliffords.CLIFFORD_ANGLES[ids], ids)


@dataclass
class CircuitBatch:
    n: int
    layers: List[LayerBatch]

    @property
    def size(self):
        sizes = {lb.size for lb in self.layers}
        if len(sizes) > 1:
            raise ValueError("inconsistent batch sizes")
        return sizes.pop() if sizes else 1

    def __len__(self):
        return self.size

    @property
    def depth(self):
        return len(self.layers)

    def circuit(self, b):
        return Circuit(self.n, tuple(lb.layer(self.n, b) for lb in self.layers))

    def circuits(self):
        return [self.circuit(b) for b in range(self.size)]

    def take(self, index):
        return CircuitBatch(self.n, [lb.take(index) for lb in self.layers])

    @classmethod
    def from_circuit(cls, c, size=1):
        return cls(c.n, [layer_batch_from_layer(layer, size) for layer in c.layers])

    @classmethod
    def concatenate(cls, parts):
        """Join batches in time order; batch sizes must agree (size-1 parts broadcast)."""
        n = parts[0].n
        size = max(p.size for p in parts)
        layers = []
        for p in parts:
            if p.n != n:
                raise ValueError("width mismatch")
            for lb in p.layers:
                if lb.size == size:
                    layers.append(lb)
                elif lb.size == 1:
                    layers.append(
                        LayerBatch(lb.kind, lb.qubits, np.repeat(lb.angles, size, axis=0),
                                   np.repeat(lb.clifford_ids, size, axis=0), lb.pairs)
                    )
                else:
                    raise ValueError("batch size mismatch")
        return cls(n, layers)
