"""Shared helpers: random standardized laws and independent oracles."""

import numpy as np
import pytest

from beccert.dist import DiscreteDistribution, standardize

SEED = 20260809


def random_standardized_law(rng, max_atoms=6, min_atoms=2):
    """Atoms uniform on [-5, 5] with a minimum gap, Dirichlet weights,
    then standardized."""
    while True:
        k = int(rng.integers(min_atoms, max_atoms + 1))
        atoms = np.sort(rng.uniform(-5.0, 5.0, size=k))
        if k > 1 and np.min(np.diff(atoms)) < 1e-3:
            continue
        probs = rng.dirichlet(np.ones(k))
        if np.min(probs) < 1e-9:
            continue
        d = DiscreteDistribution(atoms, probs)
        return standardize(d)


@pytest.fixture
def rng():
    return np.random.default_rng(SEED)


def riemann_kappa1(F, G, lo, hi, n=400_000):
    """Brute-force mean metric by dense midpoint sampling (oracle)."""
    xs = np.linspace(lo, hi, n)
    mid = (xs[:-1] + xs[1:]) / 2.0
    h = (hi - lo) / (n - 1)
    fv = F(mid) if callable(F) else F
    gv = G(mid) if callable(G) else G
    return float(np.sum(np.abs(fv - gv)) * h)
