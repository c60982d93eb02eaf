"""QAOA MaxCut benchmark circuits on random weighted graphs.

The circuit for angles ``(alpha_k, beta_k)`` is, in time order::

    H-equivalent layer
    for k in 1..p:
        exp(-i alpha_k w_ij Z_i Z_j) for every edge, packed into matchings,
            each term as CNOT(i, j) . Rz(2 alpha_k w_ij) on j . CNOT(i, j)
        exp(-i beta_k X) on every qubit

Every single-qubit layer carries a gate on every qubit (identities where
nothing else is needed) and adjacent CNOT layers are separated by such an
identity layer, so the circuit strictly alternates and its pulse count matches
the randomly compiled version of itself.
"""

from dataclasses import dataclass
from typing import Tuple

import numpy as np

from .circuit import AlternatingCircuit, Gate, Layer
from .gates1q import wrap_angle, xrot, zrot, zxzxz_angles

_H = np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2)
HADAMARD_ANGLES = tuple(float(a) for a in zxzxz_angles(_H))
IDENTITY_ANGLES = tuple(float(a) for a in zxzxz_angles(np.eye(2)))


@dataclass(frozen=True)
class WeightedGraph:
    n: int
    edges: Tuple[Tuple[int, int], ...]
    weights: Tuple[float, ...]

    def __post_init__(self):
        edges = tuple((min(int(i), int(j)), max(int(i), int(j))) for i, j in self.edges)
        weights = tuple(float(w) for w in self.weights)
        if len(edges) != len(weights):
            raise ValueError("one weight per edge required")
        if any(i == j for i, j in edges):
            raise ValueError("self-loops are not allowed")
        if len(set(edges)) != len(edges):
            raise ValueError("duplicate edges are not allowed")
        if any(j >= self.n for _, j in edges):
            raise ValueError("edge endpoint out of range")
        if not all(np.isfinite(weights)):
            raise ValueError("edge weights must be finite")
        object.__setattr__(self, "edges", edges)
        object.__setattr__(self, "weights", weights)


def uniform_weights(rng, size):
    return rng.uniform(0.0, 1.0, size)


def sample_er_graph(n, edge_probability=0.5, weight_distribution=uniform_weights, rng=None):
    """Erdos-Renyi graph with i.i.d. edge weights ``weight_distribution(rng, size)``."""
    if n < 2:
        raise ValueError("graph needs at least 2 vertices")
    if not 0 <= edge_probability <= 1:
        raise ValueError("edge probability must lie in [0, 1]")
    candidates = [(i, j) for i in range(n) for j in range(i + 1, n)]
    keep = rng.random(len(candidates)) < edge_probability
    edges = tuple(e for e, k in zip(candidates, keep) if k)
    weights = weight_distribution(rng, len(edges)) if edges else ()
    return WeightedGraph(n, edges, tuple(weights))


@dataclass(frozen=True)
class QaoaParams:
    alpha: Tuple[float, ...]
    beta: Tuple[float, ...]

    def __post_init__(self):
        if len(self.alpha) != len(self.beta):
            raise ValueError("alpha and beta must have the same length")
        for a in (*self.alpha, *self.beta):
            if not -np.pi < a <= np.pi:
                raise ValueError("QAOA angles must lie in (-pi, pi]")

    @property
    def p(self):
        return len(self.alpha)

    @classmethod
    def random(cls, p, rng):
        angles = wrap_angle(rng.uniform(-np.pi, np.pi, size=(2, p)))
        return cls(tuple(angles[0]), tuple(angles[1]))


def greedy_edge_coloring(edges):
    """Pack edges (in sorted order) into vertex-disjoint groups, first fit."""
    groups = []
    for edge in sorted(range(len(edges)), key=lambda k: edges[k]):
        i, j = edges[edge]
        for group in groups:
            if all(i not in edges[k] and j not in edges[k] for k in group):
                group.append(edge)
                break
        else:
            groups.append([edge])
    return groups


def _full_layer(n, angles_by_qubit):
    return Layer(n, tuple(Gate.u(q, *angles_by_qubit.get(q, IDENTITY_ANGLES)) for q in range(n)), "l")


def qaoa_circuit(graph: WeightedGraph, params: QaoaParams, n=None):
    if n is not None and n != graph.n:
        raise ValueError(f"graph has {graph.n} vertices but width {n} was requested")
    if params.p < 1:
        raise ValueError("QAOA needs p >= 1")
    n = graph.n
    groups = greedy_edge_coloring(graph.edges)
    layers = [_full_layer(n, {q: HADAMARD_ANGLES for q in range(n)})]
    for alpha, beta in zip(params.alpha, params.beta):
        for g, group in enumerate(groups):
            cnots = Layer(n, tuple(Gate.cnot(*graph.edges[k]) for k in group), "e")
            if g > 0:
                layers.append(_full_layer(n, {}))
            rz = {}
            for k in group:
                angle = 2 * alpha * graph.weights[k]
                rz[graph.edges[k][1]] = tuple(float(a) for a in zxzxz_angles(zrot(angle)))
            layers += [cnots, _full_layer(n, rz), cnots]
        driver = tuple(float(a) for a in zxzxz_angles(xrot(2 * beta)))
        if not groups:
            layers.append(Layer(n, (), "e"))
        layers.append(_full_layer(n, {q: driver for q in range(n)}))
    return AlternatingCircuit(n, tuple(layers))
