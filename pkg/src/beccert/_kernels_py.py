"""NumPy implementations of the hot elementwise kernels.

These are the inner-loop functions evaluated on quadrature-node arrays:
the characteristic-function majorant b(t, gamma), the modulus bounds
fhat1/fhat2/fhat3, the CF-difference bounds dhat1/dhat2 (Dawson closed
forms) and the raw integrands of dhat3/dhat4, plus the smoothing-kernel
weights of the Prawitz right-hand side.

A compiled Cython twin (beccert._kernels) implements the same signatures;
beccert._backend picks one at import time.  Formulas and branch cuts must
stay in exact agreement between the two modules.
"""

import numpy as np
from scipy.special import dawsn

BACKEND_NAME = "numpy"

# Frozen majorant constants (17 significant digits; selfcheck re-derives
# them and the test suite checks the recomputation to 1e-12).
#   A_CONST = max_{x>0} (cos x - 1 + x^2/2)/x^3, attained at M_CONST,
#   L_CONST = inf_{t>=0} exp(-t^2/2 + 2*A_CONST*t^3) = exp(-1/(216 a^2)).
A_CONST = 0.09916191351477185
M_CONST = 3.995895679077886
L_CONST = 0.6244889281697439

TWO_PI = 2.0 * np.pi
SQRT2 = np.sqrt(2.0)
INV_6A = 1.0 / (6.0 * A_CONST)
# dhat2 tail-branch offset exp((1/6a)^2/2) * ((1/6a)/2 - Daw((1/6a)/sqrt2)/sqrt2)
DHAT2_C1 = float(
    np.exp(INV_6A**2 / 2.0) * (INV_6A / 2.0 - dawsn(INV_6A / SQRT2) / SQRT2)
)
EXP_108 = float(np.exp(1.0 / (108.0 * A_CONST**2)))


def b_vec(t, gamma):
    """Three-branch majorant of log|CF|^2: b(t, gamma) elementwise in t."""
    t = np.abs(np.asarray(t, dtype=np.float64))
    gt = gamma * t
    cubic = -t * t + 2.0 * gamma * A_CONST * t**3
    cosine = -(2.0 / (gamma * gamma)) * (1.0 - np.cos(gt))
    return np.where(gt < M_CONST, cubic, np.where(gt <= TWO_PI, cosine, 0.0))


def fhat1_vec(t, eps):
    """Upper bound on |CF of the normalized sum|: exp(b(t, 2 eps)/2)."""
    return np.exp(0.5 * b_vec(t, 2.0 * eps))


def fhat2_vec(t, eps, n):
    """Finite-n i.i.d. CF modulus bound (1 + b(t, eps + n^-1/2)/n)^(n/2).

    The base is clamped at zero: the underlying squared-CF bound is
    max(0, 1 + b/n) since a squared modulus is nonnegative.
    """
    gamma = eps + 1.0 / np.sqrt(n)
    base = np.maximum(1.0 + b_vec(t, gamma) / n, 0.0)
    return base ** (n / 2.0)


def fhat3_vec(t, eps, m):
    """Uniform-in-n (n >= m) i.i.d. CF modulus bound exp(b(t, eps + m^-1/2)/2)."""
    gamma = eps + 1.0 / np.sqrt(m)
    return np.exp(0.5 * b_vec(t, gamma))


def dhat1_vec(t, eps):
    """CF-distance bound eps*(|t|/2 - Daw(|t|/sqrt2)/sqrt2)."""
    t = np.abs(np.asarray(t, dtype=np.float64))
    return eps * (t / 2.0 - dawsn(t / SQRT2) / SQRT2)


def dhat2_vec(t, eps):
    """Two-branch CF-distance bound with seam at A = eps^(-1/3)/(6a).

    Both branches are Dawson closed forms of the defining integrals; the
    |t| > A branch is computed jointly with the Gaussian factor so that
    exp(2*a*eps*|t|^3) never overflows on its own.
    """
    t = np.abs(np.asarray(t, dtype=np.float64))
    e13 = eps ** (1.0 / 3.0)
    A = 1.0 / (6.0 * A_CONST * e13)
    x = t * e13
    inner = np.exp(t * t * (e13 * e13 - 1.0) / 2.0) * (
        x / 2.0 - dawsn(x / SQRT2) / SQRT2
    )
    c12 = 1.0 / (12.0 * A_CONST * L_CONST)
    # the tail exponent is clamped: past ~700 the bound is vacuous anyway
    # and min(dhat1, dhat2) never selects it
    outer = (
        np.exp(-t * t / 2.0) * (DHAT2_C1 - EXP_108 * c12)
        + np.exp(np.minimum(2.0 * A_CONST * eps * t**3 - t * t / 2.0, 700.0))
        * c12
    )
    return np.where(t <= A, inner, outer)


def dhat3_integrand_vec(s, gamma, n):
    """Raw dhat3 integrand (1 + b(s,gamma)/n)^((n-1)/2) * (s^2/2) e^(s^2/2)."""
    s = np.asarray(s, dtype=np.float64)
    base = np.maximum(1.0 + b_vec(s, gamma) / n, 0.0)
    return base ** ((n - 1) / 2.0) * (s * s / 2.0) * np.exp(s * s / 2.0)


def dhat4_integrand_vec(s, gamma, m):
    """Raw dhat4 integrand exp(((m-1)/2m) b(s,gamma) + s^2/2) * s^2/2."""
    s = np.asarray(s, dtype=np.float64)
    cm = (m - 1) / (2.0 * m)
    return np.exp(cm * b_vec(s, gamma) + s * s / 2.0) * (s * s / 2.0)


def cot_residual_prod_vec(v):
    """(1-v) * (cot(pi v) - 1/(pi v)) for v in (0, 1], stable at both ends.

    Near v = 0 the two poles cancel; a truncated Laurent series keeps full
    relative accuracy where direct subtraction would lose it.  Near v = 1
    the cotangent pole is evaluated through its reflection, so the product
    tends smoothly to -1/pi.
    """
    v = np.asarray(v, dtype=np.float64)
    x = np.pi * v
    small = v < 0.02
    upper = v > 0.5
    w = 1.0 - v

    xs = np.where(small, x, 0.5)
    series = (1.0 - v) * (
        -xs / 3.0 - xs**3 / 45.0 - 2.0 * xs**5 / 945.0 - xs**7 / 4725.0
    )

    vm = np.where(small | upper, 0.25, v)
    xm = np.pi * vm
    direct = (1.0 - v) * (np.cos(xm) / np.sin(xm) - 1.0 / xm)

    # v > 1/2: (1-v)cot(pi v) = -cos(pi w) * (w / sin(pi w)),  w = 1-v
    wu = np.where(upper, w, 0.25)
    xu = np.pi * wu
    ratio = np.where(wu > 0.0, wu / np.sin(np.where(wu > 0.0, xu, 1.0)), 1.0 / np.pi)
    tail = -np.cos(xu) * ratio - wu / (np.pi * np.where(upper, v, 1.0))

    return np.where(small, series, np.where(upper, tail, direct))


def kernel_weight_vec(u, U):
    """(1/U)|K(u/U)| for the smoothing kernel K, elementwise for u in (0, U].

    K(v) = (1-|v|)/2 + (i/2)((1-|v|)cot(pi v) + sgn(v)/pi), written via the
    pole-free residual so the 1/(2 pi u) singular part appears explicitly.
    """
    u = np.asarray(u, dtype=np.float64)
    v = u / U
    re = (1.0 - v) / (2.0 * U)
    im = (cot_residual_prod_vec(v) + 1.0 / np.pi) / (2.0 * U) + (1.0 - v) / (
        2.0 * np.pi * u
    )
    return np.hypot(re, im)


def residual_weight_vec(u, U):
    """|K(u/U)/U - i/(2 pi u)|: the kernel-minus-inversion weight.

    The singular parts cancel exactly; the imaginary remainder equals
    (1-v)(cot(pi v) - 1/(pi v))/(2U), which vanishes as u -> 0, leaving
    the limit 1/(2U).
    """
    u = np.asarray(u, dtype=np.float64)
    v = u / U
    re = (1.0 - v) / (2.0 * U)
    im = cot_residual_prod_vec(v) / (2.0 * U)
    return np.hypot(re, im)


def phi_vec(t):
    """Standard normal characteristic function exp(-t^2/2)."""
    t = np.asarray(t, dtype=np.float64)
    return np.exp(-t * t / 2.0)


def gauss_tail_vec(u):
    """exp(-u^2/2)/(2 pi u), the inversion-tail integrand."""
    u = np.asarray(u, dtype=np.float64)
    return np.exp(-u * u / 2.0) / (2.0 * np.pi * u)


def i1_general_integrand_vec(u, U, eps):
    """Fused I1 integrand, general mode: kernel weight * min(dhat1, dhat2)."""
    return kernel_weight_vec(u, U) * np.minimum(dhat1_vec(u, eps), dhat2_vec(u, eps))


def i3_integrand_vec(u, U):
    """Fused I3 integrand: residual weight * normal CF."""
    return residual_weight_vec(u, U) * phi_vec(u)
