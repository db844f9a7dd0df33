"""Exact arithmetic on finitely supported probability distributions.

Moments, standardization, convolution, characteristic functions and the
exact Kolmogorov distance to the standard normal.  Everything here is a
pure function of immutable values.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np
from scipy.special import erfc

PROB_SUM_TOL = 1e-9
MERGE_TOL = 1e-12


class DistributionError(ValueError):
    """Invalid distribution data or violated precondition."""


def normal_cdf(x):
    """Standard normal CDF via the complementary error function."""
    if np.ndim(x) == 0:
        return 0.5 * math.erfc(-float(x) / math.sqrt(2.0))
    return 0.5 * erfc(-np.asarray(x, dtype=float) / np.sqrt(2.0))


@dataclass(frozen=True)
class DiscreteDistribution:
    """Finite list of atoms with probabilities.

    Atoms must be strictly increasing.  Probabilities must be nonnegative
    and sum to 1 within 1e-9; the constructor then rescales exactly to sum
    1 (larger deviations are rejected rather than silently normalized).
    Zero-probability atoms are dropped.
    """

    atoms: tuple
    probs: tuple

    def __init__(self, atoms, probs):
        atoms = [float(a) for a in atoms]
        probs = [float(p) for p in probs]
        if len(atoms) != len(probs) or not atoms:
            raise DistributionError("atoms and probs must be equal-length, nonempty")
        pairs = [(a, p) for a, p in zip(atoms, probs) if p != 0.0]
        if not pairs:
            raise DistributionError("all probabilities are zero")
        atoms = [a for a, _ in pairs]
        probs = [p for _, p in pairs]
        if any(p < 0.0 for p in probs):
            raise DistributionError("negative probability")
        if any(b <= a for a, b in zip(atoms, atoms[1:])):
            raise DistributionError("atoms must be strictly increasing")
        total = math.fsum(probs)
        if abs(total - 1.0) >= PROB_SUM_TOL:
            raise DistributionError(f"probabilities sum to {total!r}, not 1")
        probs = [p / total for p in probs]
        object.__setattr__(self, "atoms", tuple(atoms))
        object.__setattr__(self, "probs", tuple(probs))

    @property
    def x(self):
        return np.asarray(self.atoms)

    @property
    def p(self):
        return np.asarray(self.probs)

    def scaled(self, c):
        """Distribution of c*X for c > 0."""
        if c <= 0:
            raise DistributionError("scale must be positive")
        return DiscreteDistribution([c * a for a in self.atoms], self.probs)

    def to_json(self):
        return json.dumps({"atoms": list(self.atoms), "probs": list(self.probs)})

    @classmethod
    def from_json(cls, text):
        data = json.loads(text)
        return cls(data["atoms"], data["probs"])


@dataclass(frozen=True)
class MomentSummary:
    """Raw moments about zero: mean, variance, E|X|^3 and E X^3."""

    mean: float
    variance: float
    beta3: float
    mu3: float


def moments(d: DiscreteDistribution) -> MomentSummary:
    x, p = d.x, d.p
    mean = float(np.dot(p, x))
    variance = float(np.dot(p, (x - mean) ** 2))
    beta3 = float(np.dot(p, np.abs(x) ** 3))
    mu3 = float(np.dot(p, x**3))
    return MomentSummary(mean, variance, beta3, mu3)


def standardize(d: DiscreteDistribution) -> DiscreteDistribution:
    """Affine map to mean 0, variance 1."""
    m = moments(d)
    if m.variance <= 0.0:
        raise DistributionError("cannot standardize a zero-variance distribution")
    s = math.sqrt(m.variance)
    return DiscreteDistribution([(a - m.mean) / s for a in d.atoms], d.probs)


def convolve(d1: DiscreteDistribution, d2: DiscreteDistribution) -> DiscreteDistribution:
    """Distribution of the sum of independent draws.

    Sums closer than 1e-12 are merged with probabilities added, which keeps
    the support from blowing up on floating-point near-duplicates.
    """
    sums = np.add.outer(d1.x, d2.x).ravel()
    weights = np.multiply.outer(d1.p, d2.p).ravel()
    order = np.argsort(sums, kind="stable")
    sums = sums[order]
    weights = weights[order]
    new_group = np.empty(sums.size, dtype=bool)
    new_group[0] = True
    np.greater(np.diff(sums), MERGE_TOL, out=new_group[1:])
    starts = np.flatnonzero(new_group)
    atoms = sums[starts]
    probs = np.add.reduceat(weights, starts)
    return DiscreteDistribution(atoms, probs)


def convolve_many(ds) -> DiscreteDistribution:
    ds = list(ds)
    if not ds:
        raise DistributionError("empty collection")
    acc = ds[0]
    for d in ds[1:]:
        acc = convolve(acc, d)
    return acc


def cf(d: DiscreteDistribution, t):
    """Characteristic function E exp(itX); t may be a scalar or array."""
    t_arr = np.asarray(t, dtype=float)
    vals = np.exp(1j * np.multiply.outer(t_arr, d.x)) @ d.p
    return complex(vals) if np.ndim(t) == 0 else vals


def cf_derivative(d: DiscreteDistribution, t):
    """d/dt of the characteristic function."""
    t_arr = np.asarray(t, dtype=float)
    vals = (np.exp(1j * np.multiply.outer(t_arr, d.x)) * (1j * d.x)) @ d.p
    return complex(vals) if np.ndim(t) == 0 else vals


def _require_standardized(d, where):
    m = moments(d)
    if abs(m.mean) > 1e-9 or abs(m.variance - 1.0) > 1e-9:
        raise DistributionError(
            f"{where} requires a standardized distribution "
            f"(mean={m.mean:.3g}, var={m.variance:.3g})"
        )
    return m


def zero_bias_cf(d: DiscreteDistribution, t):
    """CF of the zero-biased law, -f'(t)/t, for standardized d.

    Below |t| = 1e-8 the removable singularity is filled with the
    second-order Taylor expansion 1 + i t mu3/2 - t^2 mu4/6.
    """
    _require_standardized(d, "zero_bias_cf")
    x, p = d.x, d.p
    mu3 = float(np.dot(p, x**3))
    mu4 = float(np.dot(p, x**4))

    t_arr = np.asarray(t, dtype=float)
    scalar = np.ndim(t) == 0
    t_flat = np.atleast_1d(t_arr).astype(float)
    out = np.empty(t_flat.shape, dtype=complex)
    small = np.abs(t_flat) < 1e-8
    ts = t_flat[small]
    out[small] = 1.0 + 0.5j * ts * mu3 - ts * ts * mu4 / 6.0
    tb = t_flat[~small]
    if tb.size:
        fprime = (np.exp(1j * np.multiply.outer(tb, x)) * (1j * x)) @ p
        out[~small] = -fprime / tb
    return complex(out[0]) if scalar else out.reshape(t_arr.shape)


def kolmogorov_vs_normal(d: DiscreteDistribution) -> float:
    """Exact sup_x |F(x) - Phi(x)|, attained at an atom from left or right."""
    cum = np.cumsum(d.p)
    before = np.concatenate([[0.0], cum[:-1]])
    phi = normal_cdf(d.x)
    return float(np.max(np.maximum(np.abs(cum - phi), np.abs(before - phi))))
