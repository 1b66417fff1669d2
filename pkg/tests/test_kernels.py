"""Backend parity: the numba kernels and the numpy fallback compute the
same math on identical inputs."""

import numpy as np
import pytest

from jguard.kernels import active_backend, kernels_for

HAS_NUMBA = True
try:
    import numba  # noqa: F401
except ImportError:  # pragma: no cover
    HAS_NUMBA = False

needs_numba = pytest.mark.skipif(not HAS_NUMBA, reason="numba not installed")


def _random_net(seed, batch=7, d=11, h1=16, l=6, h2=4):
    rng = np.random.Generator(np.random.PCG64(seed))
    x = np.ascontiguousarray(rng.normal(size=(batch, d)))
    y = np.ascontiguousarray(rng.integers(0, 2, batch))
    params = []
    for fan_in, fan_out in ((d, h1), (h1, l), (l, h2), (h2, 2)):
        params.append(np.ascontiguousarray(rng.normal(size=(fan_in, fan_out)) / np.sqrt(fan_in)))
        params.append(rng.normal(size=fan_out))
    m1 = np.ascontiguousarray((rng.random((batch, h1)) >= 0.3) / 0.7)
    m2 = np.ascontiguousarray((rng.random((batch, h2)) >= 0.3) / 0.7)
    return x, y, params, m1, m2


def test_backend_selection_env(monkeypatch):
    monkeypatch.setenv("JGUARD_BACKEND", "numpy")
    assert active_backend() == "numpy"
    assert kernels_for().name == "numpy"
    monkeypatch.setenv("JGUARD_BACKEND", "nonsense")
    with pytest.raises(RuntimeError):
        active_backend()


@needs_numba
def test_forward_parity():
    x, _, params, _, _ = _random_net(3)
    out_np = kernels_for("numpy").fusion_forward(x, *params)
    out_nb = kernels_for("numba").fusion_forward(x, *params)
    assert np.allclose(out_np, out_nb, rtol=1e-12, atol=1e-14)


@needs_numba
def test_loss_grads_parity_with_dropout_masks():
    for seed in range(5):
        x, y, params, m1, m2 = _random_net(seed)
        out_np = kernels_for("numpy").fusion_loss_grads(x, y, *params, m1, m2)
        out_nb = kernels_for("numba").fusion_loss_grads(x, y, *params, m1, m2)
        assert abs(out_np[0] - out_nb[0]) <= 1e-12
        for a, b in zip(out_np[1:], out_nb[1:]):
            assert np.allclose(a, b, rtol=1e-10, atol=1e-13)


@needs_numba
def test_lr_kernel_parity():
    rng = np.random.Generator(np.random.PCG64(8))
    x = np.ascontiguousarray(rng.normal(size=(50, 13)))
    y = np.ascontiguousarray(rng.integers(0, 2, 50).astype(np.float64))
    w = rng.normal(size=13)
    out_np = kernels_for("numpy").lr_loss_grad(x, y, w, 0.25, 0.01)
    out_nb = kernels_for("numba").lr_loss_grad(x, y, w, 0.25, 0.01)
    assert abs(out_np[0] - out_nb[0]) <= 1e-12
    assert np.allclose(out_np[1], out_nb[1], rtol=1e-10, atol=1e-14)
    assert abs(out_np[2] - out_nb[2]) <= 1e-14


def test_numpy_kernel_losses_are_finite_and_positive():
    x, y, params, m1, m2 = _random_net(12)
    loss = kernels_for("numpy").fusion_loss_grads(x, y, *params, m1, m2)[0]
    assert np.isfinite(loss) and loss > 0
