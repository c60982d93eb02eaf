"""Error-model families for the simulator.

Physical noise attaches to pulses, never to Z rotations:

* every single-qubit gate runs as ``Z X90 Z X90 Z``; each X90 pulse on qubit
  ``q`` is over-rotated to ``exp(-i (pi/2 + theta_q) X / 2)`` and then followed
  by a stochastic Pauli channel with total rate ``eps_q`` split over X, Y, Z;
* each CNOT on pair ``{q, q'}`` is over-rotated to
  ``exp(-i (pi/2 + theta) (I - Z) (x) (I - X) / 2)`` (control first) and then
  followed by a two-qubit stochastic Pauli channel whose total rate is split
  over the 15 non-identity Paulis (indexed lower qubit first);
* before measurement each qubit suffers a Pauli channel with rate ``r_q``
  split evenly over X, Y, Z.

Rates are sampled uniformly below the family caps; splits are flat Dirichlet
draws. Two extra families support testing: ``zero`` (noise free) and
``depolarizing`` (a global depolarizing channel after every non-empty layer,
with one polarization for layers containing a CNOT and another for
single-qubit layers, plus global depolarizing before readout).
"""

import json
from dataclasses import dataclass, field
from itertools import combinations
from typing import Dict, Tuple

import numpy as np

from .gates1q import xrot
from .pauli import PauliChannel
from .superop import ptm_from_unitary

FAMILY_CAPS = {
    "S": {"theta1": 0.0, "theta2": 0.0, "eps1": 1e-2, "eps2": 2e-2, "readout": 1e-2},
    "H": {"theta1": 0.125, "theta2": 0.25, "eps1": 0.0, "eps2": 0.0, "readout": 1e-2},
    "S+H": {"theta1": 0.075, "theta2": 0.125, "eps1": 5e-3, "eps2": 1e-2, "readout": 1e-2},
    "H-2Q": {"theta1": 0.0, "theta2": 0.25, "eps1": 0.0, "eps2": 0.0, "readout": 1e-2},
    "zero": {"theta1": 0.0, "theta2": 0.0, "eps1": 0.0, "eps2": 0.0, "readout": 0.0},
}
PHYSICAL_FAMILIES = ("S", "H", "S+H", "H-2Q")
# polarization floors for the depolarizing test family
DEPOLARIZING_CAPS = {"layer1": 0.02, "layer2": 0.05, "readout": 0.02}
FAMILIES = PHYSICAL_FAMILIES + ("zero", "depolarizing")

_CNOT_GENERATOR = np.kron(np.diag([0.0, 2.0]), np.array([[1.0, -1.0], [-1.0, 1.0]])) / 2


def overrotated_x90(theta):
    return xrot(np.pi / 2 + theta)


def overrotated_cnot(theta):
    """``exp(-i (pi/2 + theta) H)`` with ``H = (I - Z) (x) (I - X) / 2``; exact CNOT at 0."""
    w, v = np.linalg.eigh(_CNOT_GENERATOR)
    return (v * np.exp(-1j * (np.pi / 2 + theta) * w)) @ v.conj().T


def pauli_rates(eps, split):
    """Full rate vector: identity with ``1 - eps``, the rest split over non-identity Paulis."""
    return np.concatenate([[1.0 - eps], eps * np.asarray(split)])


@dataclass
class ErrorModel:
    """One sampled noise instance on ``n`` qubits."""

    n: int
    family: str
    caps: Dict[str, float]
    x90_theta: np.ndarray = None  # (n,)
    x90_eps: np.ndarray = None  # (n,)
    x90_split: np.ndarray = None  # (n, 3) over X, Y, Z
    cnot_theta: Dict[Tuple[int, int], float] = field(default_factory=dict)
    cnot_eps: Dict[Tuple[int, int], float] = field(default_factory=dict)
    cnot_split: Dict[Tuple[int, int], np.ndarray] = field(default_factory=dict)
    readout: np.ndarray = None  # (n,)
    layer_polarization: Tuple[float, float] = (1.0, 1.0)  # (single-qubit layer, CNOT layer)
    readout_polarization: float = 1.0

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ValueError(f"unknown error-model family {self.family!r}; expected one of {FAMILIES}")
        n = self.n
        zeros = np.zeros(n)
        self.x90_theta = zeros.copy() if self.x90_theta is None else np.asarray(self.x90_theta, float)
        self.x90_eps = zeros.copy() if self.x90_eps is None else np.asarray(self.x90_eps, float)
        if self.x90_split is None:
            self.x90_split = np.full((n, 3), 1 / 3)
        self.x90_split = np.asarray(self.x90_split, float).reshape(n, 3)
        self.readout = zeros.copy() if self.readout is None else np.asarray(self.readout, float)
        for pair in combinations(range(n), 2):
            self.cnot_theta.setdefault(pair, 0.0)
            self.cnot_eps.setdefault(pair, 0.0)
            self.cnot_split.setdefault(pair, np.full(15, 1 / 15))
        self.cnot_split = {k: np.asarray(v, float) for k, v in self.cnot_split.items()}
        self._validate()
        self._x90_ptms = None
        self._cnot_ptms = {}

    def _validate(self):
        caps = self.caps
        if self.family == "depolarizing":
            for lam in (*self.layer_polarization, self.readout_polarization):
                if not 0 <= lam <= 1:
                    raise ValueError("polarizations must lie in [0, 1]")
            return
        tol = 1e-15

        def check(values, cap, name):
            values = np.asarray(list(values), float)
            if values.size and (values.min() < 0 or values.max() > cap + tol):
                raise ValueError(f"{name} outside [0, {cap}]")

        check(self.x90_theta, caps["theta1"], "theta1")
        check(self.x90_eps, caps["eps1"], "eps1")
        check(self.cnot_theta.values(), caps["theta2"], "theta2")
        check(self.cnot_eps.values(), caps["eps2"], "eps2")
        check(self.readout, caps["readout"], "readout")
        for split in [*self.x90_split, *self.cnot_split.values()]:
            if split.min() < 0 or abs(split.sum() - 1) > 1e-12:
                raise ValueError("error splits must be nonnegative and sum to 1")

    # -- sampling ---------------------------------------------------------

    @classmethod
    def zero(cls, n):
        return cls(n, "zero", dict(FAMILY_CAPS["zero"]))

    @classmethod
    def sample(cls, family, n, rng, caps=None):
        """Draw a fresh model; every draw happens in a fixed order whatever the family."""
        if family == "depolarizing":
            caps = dict(caps or DEPOLARIZING_CAPS)
            lam1 = 1 - rng.uniform(0, caps["layer1"])
            lam2 = 1 - rng.uniform(0, caps["layer2"])
            lam_r = 1 - rng.uniform(0, caps["readout"])
            return cls(n, family, caps, layer_polarization=(lam1, lam2), readout_polarization=lam_r)
        if family not in FAMILY_CAPS:
            raise ValueError(f"unknown error-model family {family!r}; expected one of {FAMILIES}")
        caps = dict(caps or FAMILY_CAPS[family])
        theta1 = rng.uniform(0, 1, n) * caps["theta1"]
        eps1 = rng.uniform(0, 1, n) * caps["eps1"]
        split1 = rng.dirichlet(np.ones(3), size=n)
        pairs = list(combinations(range(n), 2))
        theta2 = rng.uniform(0, 1, len(pairs)) * caps["theta2"]
        eps2 = rng.uniform(0, 1, len(pairs)) * caps["eps2"]
        split2 = rng.dirichlet(np.ones(15), size=len(pairs))
        readout = rng.uniform(0, 1, n) * caps["readout"]
        return cls(
            n, family, caps,
            x90_theta=theta1, x90_eps=eps1, x90_split=split1,
            cnot_theta={p: float(t) for p, t in zip(pairs, theta2)},
            cnot_eps={p: float(e) for p, e in zip(pairs, eps2)},
            cnot_split={p: s for p, s in zip(pairs, split2)},
            readout=readout,
        )

    # -- channels -----------------------------------------------------------

    @property
    def is_depolarizing(self):
        return self.family == "depolarizing"

    def x90_ptms(self):
        """``(n, 4, 4)`` PTMs of the noisy X90 pulse on each qubit."""
        if self._x90_ptms is None:
            out = np.empty((self.n, 4, 4))
            for q in range(self.n):
                unitary = ptm_from_unitary(overrotated_x90(self.x90_theta[q]))
                rates = pauli_rates(self.x90_eps[q], self.x90_split[q])
                out[q] = PauliChannel(1, rates).ptm() @ unitary
            self._x90_ptms = out
        return self._x90_ptms

    def cnot_ptm(self, control, target):
        """16x16 PTM of a noisy CNOT, indexed (control, target)."""
        key = (control, target)
        if key not in self._cnot_ptms:
            pair = tuple(sorted(key))
            unitary = ptm_from_unitary(overrotated_cnot(self.cnot_theta[pair]))
            rates = pauli_rates(self.cnot_eps[pair], self.cnot_split[pair])
            diag = PauliChannel(2, rates).ptm_diagonal()
            if key != pair:
                diag = diag.reshape(4, 4).T.reshape(16)
            self._cnot_ptms[key] = diag[:, None] * unitary
        return self._cnot_ptms[key]

    def readout_factors(self):
        """Per-qubit survival factor of the Z component before measurement."""
        return 1 - 4 * self.readout / 3

    # -- serialization ---------------------------------------------------------

    def to_dict(self):
        pairs = sorted(self.cnot_theta)
        return {
            "family": self.family,
            "n": self.n,
            "caps": self.caps,
            "x90": [
                {"qubit": q, "theta": float(self.x90_theta[q]), "eps": float(self.x90_eps[q]),
                 "split_xyz": [float(v) for v in self.x90_split[q]]}
                for q in range(self.n)
            ],
            "cnot": [
                {"pair": list(p), "theta": float(self.cnot_theta[p]), "eps": float(self.cnot_eps[p]),
                 "split": [float(v) for v in self.cnot_split[p]]}
                for p in pairs
            ],
            "readout": [float(v) for v in self.readout],
            "layer_polarization": list(self.layer_polarization),
            "readout_polarization": self.readout_polarization,
        }

    def to_text(self):
        return json.dumps(self.to_dict(), indent=2) + "\n"

    @classmethod
    def from_dict(cls, data):
        n = int(data["n"])
        x90 = sorted(data["x90"], key=lambda r: r["qubit"])
        return cls(
            n, data["family"], dict(data["caps"]),
            x90_theta=[r["theta"] for r in x90] or None,
            x90_eps=[r["eps"] for r in x90] or None,
            x90_split=[r["split_xyz"] for r in x90] or None,
            cnot_theta={tuple(r["pair"]): r["theta"] for r in data["cnot"]},
            cnot_eps={tuple(r["pair"]): r["eps"] for r in data["cnot"]},
            cnot_split={tuple(r["pair"]): r["split"] for r in data["cnot"]},
            readout=data["readout"],
            layer_polarization=tuple(data["layer_polarization"]),
            readout_polarization=data["readout_polarization"],
        )

    @classmethod
    def from_text(cls, text):
        return cls.from_dict(json.loads(text))


def pauli_letters_2q():
    """Labels of the 15 non-identity two-qubit Paulis in split order."""
    letters = "IXYZ"
    return [letters[a] + letters[b] for a in range(4) for b in range(4)][1:]

