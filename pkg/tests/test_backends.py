"""Parity and correctness of the two kernel backends."""

import numpy as np
import pytest

from eofdual import _core_py, backend

try:
    from eofdual import _core
except ImportError:
    _core = None

IMPLS = [("python", _core_py.entropy_and_gradient)]
if _core is not None:
    IMPLS.append(("compiled", _core.entropy_and_gradient))


def random_batch(k, da, db, seed):
    rng = np.random.default_rng(seed)
    return rng.standard_normal((k, da, db)) + 1j * rng.standard_normal((k, da, db))


@pytest.mark.skipif(_core is None, reason="extension not built")
@pytest.mark.parametrize("shape", [(1, 2, 2), (4, 2, 2), (16, 4, 4), (3, 3, 5)])
def test_backends_agree(shape):
    w = random_batch(*shape, seed=hash(shape) % 2**31)
    v_py, g_py = _core_py.entropy_and_gradient(w)
    v_c, g_c = _core.entropy_and_gradient(w)
    assert v_py == pytest.approx(v_c, abs=1e-11)
    np.testing.assert_allclose(g_py, g_c, atol=1e-11)


@pytest.mark.parametrize("name,fn", IMPLS)
def test_normalized_state_entropy(name, fn):
    # Bell state: reduced state I/2, entropy exactly 1 bit
    w = (np.eye(2, dtype=complex) / np.sqrt(2))[None, :, :]
    value, grad = fn(w)
    assert value == pytest.approx(1.0, abs=1e-12)
    # grad = -log2(I/2) w = +w
    np.testing.assert_allclose(grad, w, atol=1e-12)


@pytest.mark.parametrize("name,fn", IMPLS)
def test_weighting_is_linear_in_batch(name, fn):
    w = random_batch(5, 2, 3, seed=5)
    total = fn(w)[0]
    parts = sum(fn(w[i : i + 1])[0] for i in range(5))
    assert total == pytest.approx(parts, abs=1e-10)


@pytest.mark.parametrize("name,fn", IMPLS)
def test_gradient_matches_finite_differences(name, fn):
    w = random_batch(3, 2, 2, seed=9)
    _, grad = fn(w)
    eps = 1e-6
    rng = np.random.default_rng(0)
    for _ in range(6):
        i = rng.integers(3)
        a, b = rng.integers(2), rng.integers(2)
        for unit, pick in ((1.0, np.real), (1.0j, np.imag)):
            wp, wm = w.copy(), w.copy()
            wp[i, a, b] += eps * unit
            wm[i, a, b] -= eps * unit
            num = (fn(wp)[0] - fn(wm)[0]) / (2 * eps)
            # d value = 2 Re(conj(grad) dw)
            assert num == pytest.approx(2 * pick(grad[i, a, b]), abs=1e-5)


def test_selected_backend_exposed():
    assert backend.BACKEND in ("compiled", "python")
    assert callable(backend.entropy_and_gradient)
    assert backend.pure_python() is _core_py.entropy_and_gradient
