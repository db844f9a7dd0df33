"""Special functions and characteristic-function majorants.

The majorant b(t, gamma) caps log|CF|^2 through three branches built from
the constants a (max of (cos x - 1 + x^2/2)/x^3), M (its argmax) and
l = exp(-1/(216 a^2)).  On top of it sit the CF-modulus bounds fhat1-fhat3
and the CF-distance bounds dhat1-dhat4; dhat1/dhat2 have Dawson-integral
closed forms, dhat3/dhat4 are adaptive quadratures of explicit integrands.

The small-epsilon regime is handled by a separate uniform inequality with
fixed numeric coefficients, wrapped by small_eps_bound_general/iid.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import dawsn

from ._backend import kernels
from .golden import golden_min
from .quadrature import adaptive_quad

TWO_PI = 2.0 * math.pi

# Coefficients of the auxiliary uniform bound used below the scan segment,
# valid while eps_hat + eps_prime <= 0.2.
_SMALL_COEFFS = (0.27283, 0.19948, 0.09116, 0.00095)
_SMALL_VALIDITY = 0.2


@dataclass(frozen=True)
class BoundConstants:
    """The majorant constants (a, M, l)."""

    a: float
    M: float
    l: float

    @classmethod
    def recompute(cls) -> "BoundConstants":
        """Re-derive the constants by golden-section optimization.

        a is the maximum of (cos x - 1 + x^2/2)/x^3 on (0, 2 pi], attained
        at M; l is the minimum of exp(-t^2/2 + 2 a t^3), attained at
        t = 1/(6a).
        """
        neg = lambda x: -(math.cos(x) - 1.0 + x * x / 2.0) / x**3
        M, neg_a, _ = golden_min(neg, 1e-6, TWO_PI, xtol=1e-13, max_iter=300)
        a = -neg_a
        obj = lambda t: math.exp(-t * t / 2.0 + 2.0 * a * t**3)
        t_star, l, _ = golden_min(obj, 0.0, 2.0 / (6.0 * a), xtol=1e-13, max_iter=300)
        return cls(a=a, M=M, l=l)


# Frozen high-precision values shared with the compiled kernels; the test
# suite and `selfcheck` verify recompute() against these.
CONSTANTS = BoundConstants(
    a=kernels.A_CONST, M=kernels.M_CONST, l=kernels.L_CONST
)


@dataclass(frozen=True)
class IidContext:
    """Parameters of the i.i.d. estimates: eps, summand count n, uniform
    tail threshold m, and tau = 1/sqrt(n)."""

    epsilon: float
    n: int
    m: int | None = None
    tau: float | None = None

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("n must be >= 1")
        if self.epsilon * math.sqrt(self.n) < 1.0 - 1e-9:
            raise ValueError("need epsilon * sqrt(n) >= 1 for an i.i.d. collection")
        if self.m is None:
            object.__setattr__(self, "m", self.n)
        if self.m < 1:
            raise ValueError("m must be >= 1")
        if self.tau is None:
            object.__setattr__(self, "tau", 1.0 / math.sqrt(self.n))


def _as_input(t):
    return np.atleast_1d(np.asarray(t, dtype=float))


def _as_output(vals, t):
    return float(vals[0]) if np.ndim(t) == 0 else vals.reshape(np.shape(t))


def dawson(t):
    """Dawson integral exp(-t^2) int_0^t exp(s^2) ds (odd; <= 1e-13 rel. error)."""
    if np.ndim(t) == 0:
        return float(dawsn(float(t)))
    return dawsn(np.asarray(t, dtype=float))


def b(t, gamma):
    """Three-branch majorant of log|CF|^2; nondecreasing in gamma."""
    if gamma <= 0.0:
        raise ValueError("gamma must be positive")
    return _as_output(kernels.b_vec(_as_input(t), gamma), t)


def f_hat1(epsilon: float, t):
    """General-case CF modulus bound exp(b(t, 2 eps)/2); 1 when 2 eps |t| > 2 pi."""
    if epsilon <= 0.0:
        raise ValueError("epsilon must be positive")
    return _as_output(kernels.fhat1_vec(_as_input(t), epsilon), t)


def delta_hat1(epsilon: float, t):
    """CF-distance bound eps (|t|/2 - Daw(|t|/sqrt2)/sqrt2); zero at t = 0."""
    if epsilon <= 0.0:
        raise ValueError("epsilon must be positive")
    return _as_output(kernels.dhat1_vec(_as_input(t), epsilon), t)


def delta_hat2(epsilon: float, t):
    """Two-branch CF-distance bound, continuous across |t| = eps^(-1/3)/(6a)."""
    if epsilon <= 0.0:
        raise ValueError("epsilon must be positive")
    return _as_output(kernels.dhat2_vec(_as_input(t), epsilon), t)


def branch_point_A(epsilon: float) -> float:
    """The dhat2 seam location eps^(-1/3)/(6a)."""
    return epsilon ** (-1.0 / 3.0) / (6.0 * CONSTANTS.a)


def f_hat2(ctx: IidContext, t):
    """Finite-n i.i.d. CF modulus bound (1 + b(t, eps + 1/sqrt n)/n)^(n/2),
    clamped at a zero base."""
    return _as_output(kernels.fhat2_vec(_as_input(t), ctx.epsilon, ctx.n), t)


def f_hat3(epsilon: float, m: int, t):
    """Uniform i.i.d. CF modulus bound for all n >= m."""
    if m < 1:
        raise ValueError("m must be >= 1")
    return _as_output(kernels.fhat3_vec(_as_input(t), epsilon, m), t)


def _integrand_breakpoints(gamma, hi):
    pts = (CONSTANTS.M / gamma, TWO_PI / gamma)
    return tuple(p for p in pts if 0.0 < p < hi)


def delta_hat3(ctx: IidContext, t, *, quad_tol=1e-12):
    """Finite-n i.i.d. CF-distance bound, by adaptive quadrature."""
    gamma = ctx.epsilon + 1.0 / math.sqrt(ctx.n)

    def one(tt):
        tt = abs(tt)
        if tt == 0.0:
            return 0.0
        res = adaptive_quad(
            lambda s: kernels.dhat3_integrand_vec(s, gamma, ctx.n),
            0.0, tt, quad_tol,
            points=_integrand_breakpoints(gamma, tt),
        )
        return ctx.epsilon * math.exp(-tt * tt / 2.0) * res.value

    if np.ndim(t) == 0:
        return one(float(t))
    return np.array([one(float(tt)) for tt in np.asarray(t).ravel()]).reshape(
        np.shape(t)
    )


def delta_hat4(epsilon: float, m: int, t, *, quad_tol=1e-12):
    """Uniform i.i.d. CF-distance bound for all n >= m, by adaptive quadrature."""
    if m < 1:
        raise ValueError("m must be >= 1")
    gamma = epsilon + 1.0 / math.sqrt(m)

    def one(tt):
        tt = abs(tt)
        if tt == 0.0:
            return 0.0
        res = adaptive_quad(
            lambda s: kernels.dhat4_integrand_vec(s, gamma, m),
            0.0, tt, quad_tol,
            points=_integrand_breakpoints(gamma, tt),
        )
        return epsilon * math.exp(-tt * tt / 2.0) * res.value

    if np.ndim(t) == 0:
        return one(float(t))
    return np.array([one(float(tt)) for tt in np.asarray(t).ravel()]).reshape(
        np.shape(t)
    )


def _small_eps_value(eps_hat, eps_pr, eps_dpr):
    c1, c2, c3, c4 = _SMALL_COEFFS
    return (
        c1 * eps_hat + c2 * eps_pr + c3 * eps_dpr + c4 * (eps_hat + eps_pr) ** 2
    )


def small_eps_bound_general(epsilon: float):
    """Uniform bound on rho/eps below the scan segment, general case.

    Worst-case substitution lambda = (1 - eps^(2/3))^(-1), eps_hat =
    lambda^(3/2) eps, eps' = eps_hat, eps'' = eps'^(4/3).  Returns None
    where the validity condition eps_hat + eps' <= 0.2 fails.
    """
    if epsilon <= 0.0:
        raise ValueError("epsilon must be positive")
    if epsilon >= 1.0:
        return None
    lam = 1.0 / (1.0 - epsilon ** (2.0 / 3.0))
    eps_hat = lam**1.5 * epsilon
    eps_pr = eps_hat
    if eps_hat + eps_pr > _SMALL_VALIDITY:
        return None
    eps_dpr = eps_pr ** (4.0 / 3.0)
    return _small_eps_value(eps_hat, eps_pr, eps_dpr) / epsilon


def n_zero(epsilon: float) -> int:
    """Least admissible i.i.d. summand count ceil(1/eps^2).

    A conservative nudge keeps floating-point round-up at exact piece
    edges (eps = 1/sqrt(k)) from excluding an admissible n.
    """
    return max(1, math.ceil(1.0 / (epsilon * epsilon) - 1e-9))


def small_eps_bound_iid(epsilon: float):
    """Uniform bound on rho/eps below the scan segment, i.i.d. case.

    Worst case over admissible n >= n0(eps): lambda = n0/(n0 - 1),
    eps' = lambda^(3/2)/sqrt(n0), eps'' = lambda^2/n0, eps_hat =
    lambda^(3/2) eps.  None when n0 < 2 or the validity condition fails.
    """
    if epsilon <= 0.0:
        raise ValueError("epsilon must be positive")
    n0 = n_zero(epsilon)
    if n0 < 2:
        return None
    lam = n0 / (n0 - 1.0)
    eps_hat = lam**1.5 * epsilon
    eps_pr = lam**1.5 / math.sqrt(n0)
    if eps_hat + eps_pr > _SMALL_VALIDITY:
        return None
    eps_dpr = lam**2 / n0
    return _small_eps_value(eps_hat, eps_pr, eps_dpr) / epsilon
