"""
How many shots a measurement needs, and what sampling a few diagonal
density-matrix entries reveals.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from ..ir import Circuit
from ..sim import bitstring, probabilities, run, sample


def sigma(p: float, shots: int) -> float:
    """Standard deviation of an observed frequency: sqrt(p(1-p)/N)."""
    return math.sqrt(max(p * (1 - p), 0.0) / shots)


@dataclass(frozen=True)
class ShotPlan:
    p: float
    z: float
    half_width: float
    shots: int

    @property
    def sigma(self) -> float:
        return sigma(self.p, self.shots)

    def interval(self) -> tuple[float, float]:
        """p +/- z * sigma at the planned shot count."""
        d = self.z * self.sigma
        return self.p - d, self.p + d


def estimate_shots(p: float, z: float, w: float) -> ShotPlan:
    """Smallest N with z * sqrt(p(1-p)/N) <= w."""
    if w <= 0:
        raise ValueError("confidence half-width must be positive")
    if z <= 0:
        raise ValueError("z must be positive")
    if not 0 <= p <= 1:
        raise ValueError("p must lie in [0, 1]")
    raw = z * z * p * (1 - p) / (w * w)
    # round first: 1.96**2 * 0.25 / 1e-4 evaluates to 9603.999999999998
    n = max(1, math.ceil(round(raw, 9)))
    return ShotPlan(p, z, w, n)


def qpt_config_count(n: int) -> int:
    """Experimental configurations for full process tomography on n qubits."""
    if n < 1:
        raise ValueError("n must be >= 1")
    return 4 ** n


@dataclass(frozen=True)
class SqptProbeResult:
    probed_indices: list[int]
    probabilities: list[float]
    diag_block: np.ndarray
    shots: int
    seed: int
    expected: list[float] | None = None
    flagged: list[int] = field(default_factory=list)

    def probability(self, index: int) -> float:
        return self.probabilities[self.probed_indices.index(index)]


def sqpt_diag_probe(prep: Circuit, indices: Sequence[int], shots: int, seed: int = 0, *,
                    reference: Circuit | None = None, z: float = 3.0) -> SqptProbeResult:
    """Estimate selected diagonal density-matrix entries by sampling.

    Off-diagonal entries of the returned block are set to zero: this is a
    population probe, not a reconstruction. When ``reference`` is given,
    indices whose estimate sits more than ``z`` sigma (plus one count) from
    the reference probability are flagged.
    """
    n = prep.num_qubits
    indices = [int(i) for i in indices]
    if len(set(indices)) != len(indices):
        raise ValueError("probe indices must be distinct")
    if any(not 0 <= i < 1 << n for i in indices):
        raise ValueError(f"probe indices must lie in [0, {1 << n})")
    if shots < 1:
        raise ValueError("shots must be >= 1")
    counts = sample(prep, shots, seed)
    est = [counts[bitstring(i, n)] / shots for i in indices]
    expected, flagged = None, []
    if reference is not None:
        probs = probabilities(run(reference))
        expected = [float(probs[i]) for i in indices]
        for i, p_hat, p in zip(indices, est, expected):
            if abs(p_hat - p) > z * sigma(p, shots) + 1 / shots:
                flagged.append(i)
    return SqptProbeResult(indices, est, np.diag(est), shots, seed, expected, flagged)
