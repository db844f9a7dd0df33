"""Zero-bias transformation of discrete laws and the exact mean metric.

The zero-biased version of a centered discrete law has a piecewise-constant
density and a piecewise-linear CDF, both computed here in closed form.  The
mean-metric distance kappa1 between a staircase CDF and a piecewise-linear
CDF is evaluated exactly, segment by segment, with sign-change roots found
analytically; no quadrature error enters the sharp-bound checks.

Also implements the three-point extremal function g(a, b, c) with its case
split, the random-index mixture representation of the zero-biased sum, and
the third-order-metric optimality ratio for two-point laws.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .dist import (
    DiscreteDistribution,
    DistributionError,
    convolve_many,
    moments,
)

MERGE_TOL = 1e-12


class InfeasibleThreePointError(ValueError):
    """No centered unit-variance law exists on {-a, -b, c} (ac < 1 or bc > 1)."""


@dataclass(frozen=True)
class StepCdf:
    """Right-continuous staircase CDF of a discrete law."""

    atoms: np.ndarray
    cum: np.ndarray

    @classmethod
    def from_distribution(cls, d: DiscreteDistribution) -> "StepCdf":
        return cls(d.x, np.cumsum(d.p))

    @property
    def breakpoints(self):
        return self.atoms

    def value_after(self, x):
        """F on the open interval just right of x."""
        idx = np.searchsorted(self.atoms, x, side="right")
        cum = np.concatenate([[0.0], self.cum])
        return cum[idx]

    def __call__(self, x):
        return self.value_after(x)


@dataclass(frozen=True)
class PiecewiseLinearCdf:
    """CDF that is linear between breakpoints, 0 before and 1 after."""

    breakpoints: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        bp = np.asarray(self.breakpoints, dtype=float)
        v = np.asarray(self.values, dtype=float)
        if bp.size < 2 or bp.size != v.size:
            raise ValueError("need at least two breakpoints with matching values")
        if np.any(np.diff(bp) <= 0):
            raise ValueError("breakpoints must be strictly increasing")
        if np.any(np.diff(v) < -1e-12):
            raise ValueError("values must be nondecreasing")
        if abs(v[0]) > 1e-9 or abs(v[-1] - 1.0) > 1e-9:
            raise ValueError("CDF must run from 0 to 1")
        object.__setattr__(self, "breakpoints", bp)
        object.__setattr__(self, "values", v)

    def __call__(self, x):
        return np.interp(x, self.breakpoints, self.values, left=0.0, right=1.0)


@dataclass(frozen=True)
class PiecewiseConstantDensity:
    """Density that is constant on each interval between breakpoints."""

    breakpoints: np.ndarray
    heights: np.ndarray

    def total_mass(self):
        return float(np.dot(self.heights, np.diff(self.breakpoints)))


def zero_bias_density(d: DiscreteDistribution) -> PiecewiseConstantDensity:
    """Piecewise-constant density of the zero-biased law of a centered d.

    On the interval between consecutive atoms the height is the scaled
    upper-tail first moment, equal by centering to the scaled lower-tail
    one; heights are nonnegative and integrate to 1.
    """
    m = moments(d)
    scale = max(1.0, float(np.max(np.abs(d.x))))
    if abs(m.mean) > 1e-12 * scale:
        raise DistributionError("zero-bias transform requires a centered law")
    if m.variance <= 0.0:
        raise DistributionError("zero-bias transform requires positive variance")
    if len(d.atoms) < 2:
        raise DistributionError("zero-bias transform needs at least two atoms")
    x, p = d.x, d.p
    tails = -np.cumsum(p * x)[:-1]  # -E(X 1{X<=x_j}) = E(X 1{X>x_j})
    heights = np.maximum(tails, 0.0) / m.variance
    return PiecewiseConstantDensity(x, heights)


def zero_bias_cdf(d: DiscreteDistribution) -> PiecewiseLinearCdf:
    """Exact antiderivative of the zero-bias density."""
    dens = zero_bias_density(d)
    steps = dens.heights * np.diff(dens.breakpoints)
    values = np.concatenate([[0.0], np.cumsum(steps)])
    return PiecewiseLinearCdf(dens.breakpoints, values)


def _segment_profiles(cdf, grid):
    """Values of a CDF at the left (open side) and right end of each segment."""
    if isinstance(cdf, StepCdf):
        left = cdf.value_after(grid[:-1])
        return left, left
    left = cdf(grid[:-1])
    right = cdf(grid[1:])
    return left, right


def kappa1(F, G) -> float:
    """Exact mean metric int |F - G| dx between two CDFs.

    F and G may each be a StepCdf or a PiecewiseLinearCdf.  On every
    segment of the merged breakpoint grid the difference is linear, so each
    piece is a trapezoid or two triangles with an analytic crossing point.
    """
    grid = np.unique(np.concatenate([np.asarray(F.breakpoints, dtype=float),
                                     np.asarray(G.breakpoints, dtype=float)]))
    if grid.size < 2:
        return 0.0
    f_left, f_right = _segment_profiles(F, grid)
    g_left, g_right = _segment_profiles(G, grid)
    dl = f_left - g_left
    dr = f_right - g_right
    width = np.diff(grid)
    same = dl * dr >= 0.0
    area = np.where(
        same,
        (np.abs(dl) + np.abs(dr)) / 2.0,
        (dl * dl + dr * dr) / (2.0 * np.maximum(np.abs(dl) + np.abs(dr), 1e-300)),
    )
    return float(math.fsum(area * width))


def theorem3_gap(d: DiscreteDistribution) -> float:
    """Slack of the sharp mean-metric bound: E|W|^3/2 - kappa1(W, W*).

    Zero (to rounding) exactly for two-point laws; nonnegative for every
    standardized law.
    """
    m = moments(d)
    if abs(m.mean) > 1e-9 or abs(m.variance - 1.0) > 1e-9:
        raise DistributionError("theorem3_gap requires a standardized law")
    k1 = kappa1(StepCdf.from_distribution(d), zero_bias_cdf(d))
    return 0.5 * m.beta3 - k1


@dataclass(frozen=True)
class ThreePointParams:
    """Centered unit-variance law on {-a, -b, c} solved by Cramer's rule."""

    a: float
    b: float
    c: float
    p: float
    q: float
    r: float
    delta: float
    feasible: bool


def threepoint_params(a: float, b: float, c: float) -> ThreePointParams:
    if not (a > b >= 0.0 and c > 0.0):
        raise ValueError("need a > b >= 0 and c > 0")
    delta = (a + c) * (b + c) * (a - b)
    p = (1.0 - b * c) * (c + b) / delta
    q = (a * c - 1.0) * (a + c) / delta
    r = (a * b + 1.0) * (a - b) / delta
    feasible = a * c >= 1.0 and b * c <= 1.0
    return ThreePointParams(a, b, c, p, q, r, delta, feasible)


def threepoint_distribution(params: ThreePointParams) -> DiscreteDistribution:
    """The law itself; tiny negative Cramer round-off is clamped to zero."""
    if not params.feasible:
        raise InfeasibleThreePointError(
            f"(a={params.a}, b={params.b}, c={params.c}) is infeasible"
        )
    atoms = [-params.a, -params.b, params.c]
    probs = [max(params.p, 0.0), max(params.q, 0.0), max(params.r, 0.0)]
    return DiscreteDistribution(atoms, probs)


def threepoint_case(a: float, b: float, c: float) -> str:
    """Which closed-form branch of g applies; B is used on overlaps."""
    if a * (a - b) >= 1.0 and c * (b + c) >= 1.0:
        return "B"
    if a * (a - b) <= 1.0:
        return "A"
    return "C"


def threepoint_g(a: float, b: float, c: float) -> float:
    """Closed form of kappa1(W, W*) - E|W|^3/2 for the three-point law.

    Nonpositive on the whole feasible region; equals the negative of
    theorem3_gap for the same law.
    """
    params = threepoint_params(a, b, c)
    if not params.feasible:
        raise InfeasibleThreePointError(f"(a={a}, b={b}, c={c}) is infeasible")
    p, q, r = params.p, params.q, params.r
    case = threepoint_case(a, b, c)
    if case == "A":
        return r / c - p * a**3 - q * b**3
    if case == "B":
        return p * a * (a - b - 1.0 / a) ** 2 + r / c - p * a**3 - q * b**3
    return p / a - r * c**3


def _merge_close(values, tol=MERGE_TOL):
    values = np.sort(np.asarray(values, dtype=float))
    keep = np.empty(values.size, dtype=bool)
    keep[0] = True
    np.greater(np.diff(values), tol, out=keep[1:])
    return values[keep]


def _shifted_mixture_cdf(base: PiecewiseLinearCdf, shifts, weights, grid):
    out = np.zeros(grid.size)
    for s, w in zip(shifts, weights):
        out += w * np.interp(grid - s, base.breakpoints, base.values,
                             left=0.0, right=1.0)
    return out


def mixture_zero_bias_sum(ds) -> PiecewiseLinearCdf:
    """CDF of the zero-biased normalized sum via the random-index mixture.

    Each component replaces one summand by its zero-biased version; the
    component CDFs (discrete convolved with piecewise-uniform) are exact
    piecewise-linear objects, mixed with variance weights.
    """
    ds = list(ds)
    if not ds:
        raise DistributionError("empty collection")
    moms = [moments(d) for d in ds]
    for m in moms:
        scale = 1.0 + abs(m.mean)
        if abs(m.mean) > 1e-12 * scale:
            raise DistributionError("all summands must be centered")
    total_var = math.fsum(m.variance for m in moms)
    if total_var <= 0.0:
        raise DistributionError("zero total variance")
    sigma = math.sqrt(total_var)
    scaled = [d.scaled(1.0 / sigma) for d in ds]
    weights = [m.variance / total_var for m in moms]

    comp_bps = []
    comp_data = []
    for k, dk in enumerate(scaled):
        gk = zero_bias_cdf(dk)
        others = [scaled[j] for j in range(len(scaled)) if j != k]
        if others:
            rest = convolve_many(others)
            shifts, probs = rest.x, rest.p
        else:
            shifts, probs = np.array([0.0]), np.array([1.0])
        bps = _merge_close(np.add.outer(shifts, gk.breakpoints).ravel())
        comp_bps.append(bps)
        comp_data.append((gk, shifts, probs))

    grid = _merge_close(np.concatenate(comp_bps))
    values = np.zeros(grid.size)
    for w, (gk, shifts, probs) in zip(weights, comp_data):
        values += w * _shifted_mixture_cdf(gk, shifts, probs, grid)
    values[0] = 0.0
    values[-1] = 1.0
    return PiecewiseLinearCdf(grid, np.minimum(np.maximum.accumulate(values), 1.0))


def pl_sup_distance(g1: PiecewiseLinearCdf, g2: PiecewiseLinearCdf) -> float:
    """Sup-norm distance of two piecewise-linear CDFs (exact on the union grid)."""
    grid = np.unique(np.concatenate([g1.breakpoints, g2.breakpoints]))
    return float(np.max(np.abs(g1(grid) - g2(grid))))


def threepoint_grid(na=18, nb=12, nc=14):
    """Feasible (a, b, c) triples covering the region ac >= 1, bc <= 1,
    plus samples along both case boundaries a(a-b) = 1 and c(b+c) = 1."""
    rows = []
    pad = 1.0 + 1e-12
    for a in np.geomspace(0.4, 8.0, na):
        for fb in np.linspace(0.0, 0.95, nb):
            b = fb * a
            c_lo = pad / a
            c_hi = min((1.0 / b) / pad if b > 0 else 50.0, 50.0)
            if c_hi <= c_lo:
                continue
            for c in np.geomspace(c_lo, c_hi, nc):
                rows.append((float(a), float(b), float(c)))
    for a in np.linspace(1.0, 4.0, 30):
        b = a - 1.0 / a  # exactly on a(a-b) = 1
        c_lo = pad * max(1.0 / a, 1e-6)
        c_hi = min((1.0 / b) / pad if b > 0 else 10.0, 10.0)
        if c_hi <= c_lo:
            continue
        for c in np.geomspace(c_lo, c_hi, 6):
            rows.append((float(a), float(b), float(c)))
    for b in np.linspace(0.0, 1.5, 30):
        c = (-b + math.sqrt(b * b + 4.0)) / 2.0  # exactly on c(b+c) = 1
        a_lo = pad * max(1.0 / c, b * pad + 1e-9)
        for a in np.geomspace(a_lo, 8.0 * a_lo, 6):
            if a > b and b * c <= 1.0:
                rows.append((float(a), float(b), float(c)))
    return rows


def two_point(p: float) -> DiscreteDistribution:
    """Standardized two-point law with mass p at the negative atom."""
    if not 0.0 < p < 1.0:
        raise DistributionError("p must lie in (0, 1)")
    q = 1.0 - p
    return DiscreteDistribution(
        [-math.sqrt(q / p), math.sqrt(p / q)], [p, q]
    )


def zeta3_ratio_lower(p: float) -> float:
    """(1/6)|E X^3| / E|X|^3 for the standardized two-point law; -> 1/6 as p -> 1."""
    m = moments(two_point(p))
    return abs(m.mu3) / m.beta3 / 6.0
