"""The smoothing-inequality right-hand side D*(eps, U0, U).

The Kolmogorov distance to the normal is bounded by four integrals against
the kernel K(u) = (1-|u|)/2 + (i/2)((1-|u|)cot(pi u) + sgn(u)/pi):

  I1: kernel weight times a CF-distance bound on [-U0, U0],
  I2: kernel weight times a CF-modulus bound on U0 < |u| <= U,
  I3: the kernel-minus-inversion residual times the normal CF on [-U0, U0],
  I4: the inversion tail integral over |u| > U0.

Every integrand is even, so integrals run over half ranges and are
doubled.  D* = (I1 + I2 + I3 + I4)/eps; the accumulated quadrature error
is returned as an explicit additive margin.

Three substitution modes are supported: General (dhat = min(dhat1, dhat2),
fhat = fhat1), IidFinite (dhat3/fhat2 at fixed n) and IidTail (dhat4/fhat3,
uniform over all n >= m).  The nested integrals of dhat3/dhat4 are served
from a per-mode cumulative cache, so repeated evaluations at different
(U0, U) reuse all inner work.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from ._backend import kernels
from .bounds import CONSTANTS, TWO_PI
from .quadrature import CumulativeQuad, adaptive_quad

DEFAULT_QUAD_TOL = 1e-10
DEFAULT_TRUNCATION = 40.0
INNER_TOL_FACTOR = 1e-3


@dataclass(frozen=True)
class General:
    epsilon: float


@dataclass(frozen=True)
class IidFinite:
    epsilon: float
    n: int


@dataclass(frozen=True)
class IidTail:
    epsilon: float
    m: int


BoundMode = General | IidFinite | IidTail


@dataclass(frozen=True)
class PrawitzParams:
    """Free parameters 0 < U0 <= U plus quadrature settings."""

    u0: float
    u: float
    quad_tol: float = DEFAULT_QUAD_TOL
    truncation: float = DEFAULT_TRUNCATION

    def __post_init__(self):
        if not (0.0 < self.u0 <= self.u):
            raise ValueError(f"need 0 < U0 <= U, got U0={self.u0}, U={self.u}")
        if not (1e-13 <= self.quad_tol <= 1e-6):
            raise ValueError("quad_tol must lie in [1e-13, 1e-6]")


@dataclass(frozen=True)
class PrawitzResult:
    dstar: float
    margin: float
    integrals: tuple
    neval: int

    @property
    def total(self) -> float:
        return self.dstar + self.margin


def kernel_K(u: float) -> complex:
    """The smoothing kernel at a single point, 0 < |u| <= 1.

    At |u| = 1 the (1-|u|) factors vanish and only the sign term survives.
    """
    if u == 0.0 or abs(u) > 1.0:
        raise ValueError("kernel_K is defined for 0 < |u| <= 1")
    v = abs(u)
    sign = 1.0 if u > 0 else -1.0
    if v == 1.0:
        return complex(0.0, sign / (2.0 * math.pi))
    re = 0.5 * (1.0 - v)
    prod = float(kernels.cot_residual_prod_vec(np.array([v]))[0])
    im = 0.5 * (prod + 1.0 / math.pi) + (1.0 - v) / (2.0 * math.pi * v)
    return complex(re, sign * im)


def integral3_integrand(u, U):
    """|K(u/U)/U - i/(2 pi u)| exp(-u^2/2); the u -> 0 limit is 1/(2U)."""
    arr = np.atleast_1d(np.asarray(u, dtype=float))
    vals = kernels.i3_integrand_vec(np.abs(arr), U)
    return float(vals[0]) if np.ndim(u) == 0 else vals.reshape(np.shape(u))


def integral4(u0: float, truncation: float = DEFAULT_TRUNCATION):
    """Inversion tail 2 int_{U0}^{inf} exp(-u^2/2)/(2 pi u) du.

    The integral is truncated; the analytic remainder bound
    exp(-T^2/2)/(pi T^2) is folded into the reported error.
    """
    if u0 <= 0.0:
        raise ValueError("U0 must be positive")
    if truncation <= u0:
        return _QuadLike(0.0, _gauss_tail_bound(u0), 0)
    res = adaptive_quad(kernels.gauss_tail_vec, u0, truncation, 1e-12)
    return _QuadLike(2.0 * res.value, 2.0 * res.error + _gauss_tail_bound(truncation),
                     res.neval)


@dataclass(frozen=True)
class _QuadLike:
    value: float
    error: float
    neval: int


def _gauss_tail_bound(T: float) -> float:
    # 2 * int_T^inf exp(-u^2/2)/(2 pi u) du <= exp(-T^2/2)/(pi T^2)
    return math.exp(-T * T / 2.0) / (math.pi * T * T)


class _ModeEvaluator:
    """Pointwise dhat/fhat evaluations for one bound mode.

    For the i.i.d. modes the raw inner integral is cached cumulatively, so
    a (U0, U) optimization at fixed mode pays the inner quadrature once.
    Instances are process-local and not thread-safe; concurrent scans
    should use separate processes (they are pure by construction).
    """

    def __init__(self, mode: BoundMode, quad_tol: float):
        self.mode = mode
        eps = mode.epsilon
        if eps <= 0.0:
            raise ValueError("epsilon must be positive")
        if isinstance(mode, General):
            self.gamma_f = 2.0 * eps
            self._cum = None
        elif isinstance(mode, IidFinite):
            if mode.n < 1:
                raise ValueError("n must be >= 1")
            gamma = eps + 1.0 / math.sqrt(mode.n)
            self.gamma_f = gamma
            self._cum = CumulativeQuad(
                lambda s: kernels.dhat3_integrand_vec(s, gamma, mode.n),
                tol=quad_tol * INNER_TOL_FACTOR,
                breakpoints=(CONSTANTS.M / gamma, TWO_PI / gamma),
            )
        elif isinstance(mode, IidTail):
            if mode.m < 1:
                raise ValueError("m must be >= 1")
            gamma = eps + 1.0 / math.sqrt(mode.m)
            self.gamma_f = gamma
            self._cum = CumulativeQuad(
                lambda s: kernels.dhat4_integrand_vec(s, gamma, mode.m),
                tol=quad_tol * INNER_TOL_FACTOR,
                breakpoints=(CONSTANTS.M / gamma, TWO_PI / gamma),
            )
        else:
            raise TypeError(f"unknown mode {mode!r}")

    def i1_integrand(self, U):
        eps = self.mode.epsilon
        if self._cum is None:
            return lambda u: kernels.i1_general_integrand_vec(u, U, eps)

        cum = self._cum

        def f(u):
            g, gerr = cum.eval(u)
            w = kernels.kernel_weight_vec(u, U) * eps * kernels.phi_vec(u)
            return w * g, w * gerr

        return f

    def f_integrand(self, U):
        mode = self.mode
        if isinstance(mode, General):
            return lambda u: kernels.kernel_weight_vec(u, U) * kernels.fhat1_vec(
                u, mode.epsilon
            )
        if isinstance(mode, IidFinite):
            return lambda u: kernels.kernel_weight_vec(u, U) * kernels.fhat2_vec(
                u, mode.epsilon, mode.n
            )
        return lambda u: kernels.kernel_weight_vec(u, U) * kernels.fhat3_vec(
            u, mode.epsilon, mode.m
        )

    def i1_breakpoints(self, hi):
        if isinstance(self.mode, General):
            A = self.mode.epsilon ** (-1.0 / 3.0) / (6.0 * CONSTANTS.a)
            return tuple(p for p in (A,) if 0.0 < p < hi)
        return ()

    def f_breakpoints(self, lo, hi):
        pts = (CONSTANTS.M / self.gamma_f, TWO_PI / self.gamma_f)
        return tuple(p for p in pts if lo < p < hi)


@lru_cache(maxsize=128)
def _evaluator(mode: BoundMode, quad_tol: float) -> _ModeEvaluator:
    return _ModeEvaluator(mode, quad_tol)


def prawitz_rhs(mode: BoundMode, params: PrawitzParams) -> PrawitzResult:
    """Evaluate D*(eps, U0, U) for the given substitution mode.

    Returns the value together with an additive margin accumulating the
    quadrature error estimates of all four integrals, the inner-cache
    error (for i.i.d. modes) and the I4 truncation remainder.
    """
    ev = _evaluator(mode, params.quad_tol)
    eps = mode.epsilon
    u0, U, tol = params.u0, params.u, params.quad_tol

    r1 = adaptive_quad(ev.i1_integrand(U), 0.0, u0, tol,
                       points=ev.i1_breakpoints(u0))
    r2 = adaptive_quad(ev.f_integrand(U), u0, U, tol,
                       points=ev.f_breakpoints(u0, U))
    r3 = adaptive_quad(lambda u: kernels.i3_integrand_vec(u, U), 0.0, u0, tol)
    r4 = integral4(u0, params.truncation)

    integrals = (2.0 * r1.value, 2.0 * r2.value, 2.0 * r3.value, r4.value)
    value = sum(integrals) / eps
    margin = (2.0 * (r1.error + r2.error + r3.error) + r4.error) / eps
    neval = r1.neval + r2.neval + r3.neval + r4.neval
    return PrawitzResult(value, margin, integrals, neval)
