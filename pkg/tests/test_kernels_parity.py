"""The compiled kernels and the NumPy fallback must agree everywhere."""

import numpy as np
import pytest

from beccert import _kernels_py

cy = pytest.importorskip("beccert._kernels")

Ts = np.concatenate([
    np.linspace(0.0, 30.0, 400),
    np.geomspace(1e-8, 1.0, 50),
    [1e-12, 0.5, 1.0, 3.9959, 6.2832],
])
Us = np.linspace(1e-6, 0.999999, 300)


def _close(x, y):
    # ULP-level libm differences amplify through exp() for the huge vacuous
    # dhat2 tail values; 1e-12 relative is still far below any tolerance
    # used by the certification path
    np.testing.assert_allclose(x, y, rtol=1e-12, atol=1e-300)


def test_constants_match():
    assert cy.A_CONST == _kernels_py.A_CONST
    assert cy.M_CONST == _kernels_py.M_CONST
    assert cy.L_CONST == _kernels_py.L_CONST


@pytest.mark.parametrize("gamma", [0.05, 0.3, 0.7071, 1.0184, 2.0, 5.0])
def test_b_vec(gamma):
    _close(cy.b_vec(Ts, gamma), _kernels_py.b_vec(Ts, gamma))


@pytest.mark.parametrize("eps", [0.02, 0.3536, 0.5092, 1.2, 2.0])
def test_fhat1_and_dhats(eps):
    _close(cy.fhat1_vec(Ts, eps), _kernels_py.fhat1_vec(Ts, eps))
    _close(cy.dhat1_vec(Ts, eps), _kernels_py.dhat1_vec(Ts, eps))
    _close(cy.dhat2_vec(Ts, eps), _kernels_py.dhat2_vec(Ts, eps))


@pytest.mark.parametrize("n", [1, 2, 8, 30, 1000])
def test_iid_kernels(n):
    eps = max(0.4, 1.2 / np.sqrt(n))
    gamma = eps + 1.0 / np.sqrt(n)
    _close(cy.fhat2_vec(Ts, eps, n), _kernels_py.fhat2_vec(Ts, eps, n))
    _close(cy.fhat3_vec(Ts, eps, n), _kernels_py.fhat3_vec(Ts, eps, n))
    _close(cy.dhat3_integrand_vec(Ts, gamma, n),
           _kernels_py.dhat3_integrand_vec(Ts, gamma, n))
    _close(cy.dhat4_integrand_vec(Ts, gamma, n),
           _kernels_py.dhat4_integrand_vec(Ts, gamma, n))


def test_cot_residual_prod():
    _close(cy.cot_residual_prod_vec(Us), _kernels_py.cot_residual_prod_vec(Us))


@pytest.mark.parametrize("U", [2.0, 5.9508, 8.9115, 157.0])
def test_kernel_weights(U):
    u = np.geomspace(1e-9, U * 0.999999, 400)
    _close(cy.kernel_weight_vec(u, U), _kernels_py.kernel_weight_vec(u, U))
    _close(cy.residual_weight_vec(u, U), _kernels_py.residual_weight_vec(u, U))
    _close(cy.i3_integrand_vec(u, U), _kernels_py.i3_integrand_vec(u, U))


def test_fused_i1():
    u = np.geomspace(1e-9, 2.4852, 300)
    _close(cy.i1_general_integrand_vec(u, 5.9508, 0.5092),
           _kernels_py.i1_general_integrand_vec(u, 5.9508, 0.5092))


def test_misc_vectors():
    _close(cy.phi_vec(Ts), _kernels_py.phi_vec(Ts))
    u = np.geomspace(0.1, 40.0, 200)
    _close(cy.gauss_tail_vec(u), _kernels_py.gauss_tail_vec(u))
