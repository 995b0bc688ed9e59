import numpy as np
import pytest
from scipy.linalg import expm

from slap.errors import StiffnessError
from slap.integrate import dopri5, rk4_fixed


def linear_system(seed=0, n=4, batch=3):
    rng = np.random.default_rng(seed)
    M = rng.normal(size=(batch, n, n)) + 1j * rng.normal(size=(batch, n, n))
    M = 1j * (M + M.conj().swapaxes(1, 2)) / 2 - 0.1 * np.eye(n)
    y0 = rng.normal(size=(batch, n)) + 1j * rng.normal(size=(batch, n))
    return M, y0


def test_dopri5_matches_matrix_exponential():
    M, y0 = linear_system()
    y, stats = dopri5(lambda t, y: np.einsum("bij,bj->bi", M, y), 0.0, 2.0, y0, rtol=1e-10, atol=1e-12)
    exact = np.stack([expm(2.0 * m) @ v for m, v in zip(M, y0)])
    np.testing.assert_allclose(y, exact, rtol=0, atol=1e-8)
    assert stats["nsteps"] > 0


def test_dopri5_scalar_squeeze_and_backward_free():
    y, _ = dopri5(lambda t, y: -y, 0.0, 1.0, np.array([1.0 + 0j]))
    assert y.shape == (1,)
    assert y[0] == pytest.approx(np.exp(-1.0), rel=1e-7)


def test_time_dependent_quadrature():
    y, _ = dopri5(lambda t, y: np.cos(t) * np.ones_like(y), 0.0, 3.0, np.zeros((2, 1), complex),
                  rtol=1e-10, atol=1e-12)
    np.testing.assert_allclose(y.real, np.sin(3.0), atol=1e-9)


def test_rk4_order():
    f = lambda t, y: -1j * t * y
    exact = np.exp(-1j * 0.5 * 4.0)
    e1 = abs(rk4_fixed(f, 0, 2, np.array([1 + 0j]), 50)[0] - exact)
    e2 = abs(rk4_fixed(f, 0, 2, np.array([1 + 0j]), 100)[0] - exact)
    assert 12 < e1 / e2 < 20


def test_batch_shares_worst_row_accuracy():
    rates = np.array([[1.0], [50.0]])
    y, _ = dopri5(lambda t, y: -rates * y, 0.0, 0.2, np.ones((2, 1), complex), rtol=1e-9, atol=1e-14)
    np.testing.assert_allclose(y[:, 0].real, np.exp(-rates[:, 0] * 0.2), rtol=1e-7)


def test_stiffness_error():
    with pytest.raises(StiffnessError) as info:
        dopri5(lambda t, y: -1e12 * (y - np.cos(t)), 0.0, 1.0, np.zeros(1, complex),
               rtol=1e-12, atol=1e-14, min_step=1e-6)
    assert info.value.suggested_rtol > 1e-12


def test_post_step_applied():
    calls = []

    def post(y):
        calls.append(1)
        return y

    dopri5(lambda t, y: -y, 0.0, 1.0, np.ones(1, complex), post_step=post)
    assert calls
