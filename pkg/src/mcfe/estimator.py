"""Fidelity estimation from mirror-circuit outcome data.

For one circuit with target bitstring ``y`` and Hamming-distance histogram
``h_k`` the adjusted success probability is ``S = sum_k (-1/2)**k h_k`` and the
effective polarization is ``gamma = (4**n S - 1) / (4**n - 1)``. With ensemble
means ``g1, g2, g3`` of the three mirror kinds the fidelity estimate is::

    chi_F = 1 - (4**n - 1) / 4**n * (1 - g1 / sqrt(g2 * g3))
"""

import json
import math
from dataclasses import asdict, dataclass, field
from typing import Optional, Sequence, Tuple

import numpy as np

from .superop import hamming_weights


class EstimateUndefinedError(ValueError):
    """Raised when the polarization data cannot produce a fidelity estimate."""


# ---------------------------------------------------------------------------
# Per-circuit quantities
# ---------------------------------------------------------------------------


@dataclass
class HammingHistogram:
    n: int
    h: np.ndarray

    def __post_init__(self):
        h = np.asarray(self.h, dtype=float)
        if h.shape != (self.n + 1,):
            raise ValueError(f"histogram for n={self.n} needs {self.n + 1} entries")
        if h.min() < 0 or abs(h.sum() - 1) > 1e-10:
            raise ValueError("histogram must be nonnegative and sum to 1")
        self.h = h

    @classmethod
    def from_probabilities(cls, probabilities, target):
        """From a full outcome distribution (length ``2**n``) and a target bitstring."""
        n = len(target)
        dist = hamming_weights(n)[np.arange(2**n) ^ int(target, 2)]
        return cls(n, np.bincount(dist, weights=np.asarray(probabilities, float), minlength=n + 1))

    @classmethod
    def from_counts(cls, counts, target):
        n = len(target)
        h = np.zeros(n + 1)
        total = 0
        for bits, k in counts.items():
            if len(bits) != n:
                raise ValueError("bitstring width does not match target")
            h[sum(a != b for a, b in zip(bits, target))] += k
            total += k
        if total <= 0:
            raise ValueError("no shots recorded")
        return cls(n, h / total)


def adjusted_success_probability(hist: HammingHistogram):
    return float(np.sum((-0.5) ** np.arange(hist.n + 1) * hist.h))


def effective_polarization(s, n):
    d = 4**n
    return (d * s - 1) / (d - 1)


def polarization_weights(n):
    """Per-outcome polarization contribution indexed by Hamming distance."""
    d = 4**n
    return (d * (-0.5) ** np.arange(n + 1) - 1) / (d - 1)


def gammas_from_probabilities(probabilities, targets):
    """Exact per-circuit effective polarizations from ``(B, 2**n)`` probabilities and ``(B, n)`` target bits."""
    probabilities = np.asarray(probabilities, dtype=float)
    targets = np.asarray(targets)
    n = targets.shape[1]
    target_index = targets @ (1 << np.arange(n - 1, -1, -1))
    dist = hamming_weights(n)[np.arange(2**n)[None, :] ^ target_index[:, None]]
    return np.sum(probabilities * polarization_weights(n)[dist], axis=1)


def gammas_from_counts(counts, targets):
    """Per-circuit polarizations from ``(B, 2**n)`` outcome counts."""
    counts = np.asarray(counts, dtype=float)
    return gammas_from_probabilities(counts / counts.sum(axis=1, keepdims=True), targets)


@dataclass
class GammaEstimate:
    mean: float
    values: np.ndarray


def estimate_gamma(records):
    """Mean effective polarization from ``(ShotRecord, target)`` pairs."""
    if not records:
        raise ValueError("no records to estimate from")
    values = []
    for record, target in records:
        if record.shots < 1:
            raise ValueError("every record needs at least one shot")
        hist = HammingHistogram.from_counts(record.counts, target)
        values.append(effective_polarization(adjusted_success_probability(hist), hist.n))
    values = np.array(values)
    return GammaEstimate(float(values.mean()), values)


# ---------------------------------------------------------------------------
# Fidelity estimate
# ---------------------------------------------------------------------------


def chi_f(g1, g2, g3, n):
    if g2 <= 0 or g3 <= 0:
        raise EstimateUndefinedError(
            f"polarization of the reference ensembles must be positive (gamma2={g2:.4g}, gamma3={g3:.4g})"
        )
    d = 4**n
    return 1 - (d - 1) / d * (1 - g1 / math.sqrt(g2 * g3))


def ratio_estimate(s1, s2, s3):
    """Diagnostic ``S1 / sqrt(S2 S3)``; NaN when undefined."""
    if s2 * s3 <= 0:
        return float("nan")
    return s1 / math.sqrt(s2 * s3)


def success_from_gamma(gamma, n):
    d = 4**n
    return ((d - 1) * gamma + 1) / d


def _chi_f_array(g1, g2, g3, n):
    d = 4**n
    with np.errstate(invalid="ignore", divide="ignore"):
        out = 1 - (d - 1) / d * (1 - g1 / np.sqrt(g2 * g3))
    return np.where((g2 > 0) & (g3 > 0), out, np.nan)


def bootstrap_sd(values, n, resamples=1000, rng=None):
    """Nonparametric bootstrap standard deviation of chi_F.

    Circuits are resampled with replacement within each ensemble
    independently. Resamples whose estimate is undefined are dropped.
    """
    if resamples < 100:
        raise ValueError("bootstrap needs at least 100 resamples")
    values = [np.asarray(v, dtype=float) for v in values]
    if len(values) != 3 or any(v.size == 0 for v in values):
        raise ValueError("bootstrap needs three non-empty ensembles")
    means = []
    for v in values:
        idx = rng.integers(0, v.size, size=(resamples, v.size))
        means.append(v[idx].mean(axis=1))
    chis = _chi_f_array(*means, n)
    chis = chis[np.isfinite(chis)]
    if chis.size < 2:
        return float("nan")
    return float(np.std(chis, ddof=1))


@dataclass
class FidelityEstimate:
    n: int
    chi_f: float
    gamma_hats: Tuple[float, float, float]
    counts: Tuple[int, int, int, Optional[int]]
    bootstrap_sd: float
    bootstrap_resamples: int
    ratio: float = float("nan")
    seeds: dict = field(default_factory=dict)

    @property
    def out_of_range(self):
        return not 0 <= self.chi_f <= 1

    def to_dict(self):
        data = asdict(self)
        data["out_of_range"] = self.out_of_range
        data["shots"] = "exact" if self.counts[3] is None else self.counts[3]
        return data

    def to_text(self):
        return json.dumps(self.to_dict(), indent=2, allow_nan=True) + "\n"


def estimate_fidelity(values: Sequence, n, shots=None, resamples=1000, rng=None, seeds=None):
    """Estimate from per-circuit polarizations of the three ensembles.

    Raises:
        EstimateUndefinedError: if either reference ensemble has nonpositive mean.
    """
    values = [np.asarray(v, dtype=float) for v in values]
    if len(values) != 3:
        raise ValueError("need per-circuit values for exactly three ensembles")
    for kind, v in enumerate(values, start=1):
        if v.size == 0:
            raise ValueError(f"ensemble {kind} is empty")
    g = tuple(float(v.mean()) for v in values)
    chi = chi_f(*g, n)
    s = [success_from_gamma(x, n) for x in g]
    sd = bootstrap_sd(values, n, resamples, rng if rng is not None else np.random.default_rng(0))
    return FidelityEstimate(
        n, chi, g, (*(v.size for v in values), shots), sd, resamples, ratio_estimate(*s), dict(seeds or {})
    )


# ---------------------------------------------------------------------------
# Sample complexity
# ---------------------------------------------------------------------------


@dataclass
class SamplePlan:
    alpha: float
    delta: float
    gamma0: float
    n_per_ensemble: int
    n_specific: Optional[int] = None


def plan_samples(alpha, delta, gamma0, n=None):
    """Circuits per ensemble so that the relative error is at most ``2 alpha`` w.p. ``(1 - delta)**3``.

    Returns the width-independent bound ``ceil(2 ln(2/delta) / (alpha gamma0)**2)``;
    when ``n`` is given the tighter width-specific value is reported as well.
    """
    if not alpha > 0:
        raise ValueError("alpha must be positive")
    if not 0 < delta < 1:
        raise ValueError("delta must lie in (0, 1)")
    if not 0 < gamma0 <= 1:
        raise ValueError("gamma0 must lie in (0, 1]")
    base = math.log(2 / delta) / (alpha**2 * gamma0**2)
    specific = None
    if n is not None:
        d = 4**n
        specific = math.ceil(9 / 8 * (d / (d - 1)) ** 2 * base)
    return SamplePlan(alpha, delta, gamma0, math.ceil(2 * base), specific)


def hoeffding_tail(epsilon, num, n):
    """Hoeffding bound on ``P(|gamma_hat - gamma| >= epsilon)`` for ``num`` single-shot circuits."""
    if epsilon <= 0 or num < 1:
        raise ValueError("need epsilon > 0 and N >= 1")
    d = 4**n
    return 2 * math.exp(-(8 / 9) * ((d - 1) / d) ** 2 * epsilon**2 * num)
