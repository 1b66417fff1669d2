"""Hot numeric kernels: dense-head forward/backward and logistic-regression
loss gradients.

Two interchangeable backends compute the same math:

  numba  - @njit-compiled kernels (default when numba imports)
  numpy  - pure-numpy fallback

Selection: set JGUARD_BACKEND=numpy or JGUARD_BACKEND=numba; unset picks
numba when available. Both are deterministic; cross-backend results agree
to floating-point roundoff (BLAS vs loop summation order), not bitwise.
``benchmarks/bench_kernels.py`` times the two side by side.

All kernels take C-contiguous float64 arrays. Dropout masks hold 0 or
1/(1-rate) and are drawn by the caller so randomness lives in one place.
"""

from __future__ import annotations

import os
from types import SimpleNamespace

import numpy as np

try:
    from numba import njit

    _HAVE_NUMBA = True
except ImportError:  # pragma: no cover
    _HAVE_NUMBA = False


def _resolve_backend(name: str | None = None) -> str:
    req = (name or os.environ.get("JGUARD_BACKEND", "")).strip().lower()
    if req == "numpy":
        return "numpy"
    if req == "numba":
        if not _HAVE_NUMBA:
            raise RuntimeError("JGUARD_BACKEND=numba but numba is not importable")
        return "numba"
    if req:
        raise RuntimeError(f"unknown backend {req!r} (expected 'numba' or 'numpy')")
    return "numba" if _HAVE_NUMBA else "numpy"


# ---------------------------------------------------------------------------
# numpy backend
# ---------------------------------------------------------------------------

def _np_fusion_forward(x, w1, b1, w2, b2, w3, b3, w4, b4):
    h1 = np.maximum(x @ w1 + b1, 0.0)
    c = h1 @ w2 + b2
    h2 = np.maximum(c @ w3 + b3, 0.0)
    return h2 @ w4 + b4


def _np_softmax_ce(logits, y):
    shifted = logits - logits.max(axis=1, keepdims=True)
    expz = np.exp(shifted)
    probs = expz / expz.sum(axis=1, keepdims=True)
    batch = logits.shape[0]
    loss = -np.log(probs[np.arange(batch), y]).mean()
    dlogits = probs.copy()
    dlogits[np.arange(batch), y] -= 1.0
    dlogits /= batch
    return loss, dlogits


def _np_fusion_loss_grads(x, y, w1, b1, w2, b2, w3, b3, w4, b4, m1, m2):
    z1 = x @ w1 + b1
    h1 = np.maximum(z1, 0.0) * m1
    c = h1 @ w2 + b2
    z3 = c @ w3 + b3
    h2 = np.maximum(z3, 0.0) * m2
    logits = h2 @ w4 + b4

    loss, dlogits = _np_softmax_ce(logits, y)

    gw4 = h2.T @ dlogits
    gb4 = dlogits.sum(axis=0)
    dh2 = dlogits @ w4.T
    dz3 = dh2 * m2 * (z3 > 0.0)
    gw3 = c.T @ dz3
    gb3 = dz3.sum(axis=0)
    dc = dz3 @ w3.T
    gw2 = h1.T @ dc
    gb2 = dc.sum(axis=0)
    dh1 = dc @ w2.T
    dz1 = dh1 * m1 * (z1 > 0.0)
    gw1 = x.T @ dz1
    gb1 = dz1.sum(axis=0)
    return loss, gw1, gb1, gw2, gb2, gw3, gb3, gw4, gb4


def _np_lr_loss_grad(x, y, w, b, l2):
    z = x @ w + b
    # stable binary cross-entropy with logits
    loss = float(np.mean(np.maximum(z, 0.0) - z * y + np.log1p(np.exp(-np.abs(z)))))
    loss += 0.5 * l2 * float(w @ w)
    p = 1.0 / (1.0 + np.exp(-z))
    dz = (p - y) / x.shape[0]
    gw = x.T @ dz + l2 * w
    gb = float(dz.sum())
    return loss, gw, gb


# ---------------------------------------------------------------------------
# numba backend
# ---------------------------------------------------------------------------

def _build_numba():
    @njit(cache=True)
    def _affine(a, w, b):
        out = np.dot(a, w)
        for i in range(out.shape[0]):
            for j in range(out.shape[1]):
                out[i, j] += b[j]
        return out

    @njit(cache=True)
    def nb_fusion_forward(x, w1, b1, w2, b2, w3, b3, w4, b4):
        z1 = _affine(x, w1, b1)
        for i in range(z1.shape[0]):
            for j in range(z1.shape[1]):
                if z1[i, j] < 0.0:
                    z1[i, j] = 0.0
        z3 = _affine(_affine(z1, w2, b2), w3, b3)
        for i in range(z3.shape[0]):
            for j in range(z3.shape[1]):
                if z3[i, j] < 0.0:
                    z3[i, j] = 0.0
        return _affine(z3, w4, b4)

    @njit(cache=True)
    def nb_fusion_loss_grads(x, y, w1, b1, w2, b2, w3, b3, w4, b4, m1, m2):
        batch = x.shape[0]

        z1 = _affine(x, w1, b1)
        h1 = np.empty_like(z1)
        for i in range(z1.shape[0]):
            for j in range(z1.shape[1]):
                h1[i, j] = (z1[i, j] if z1[i, j] > 0.0 else 0.0) * m1[i, j]
        c = _affine(h1, w2, b2)
        z3 = _affine(c, w3, b3)
        h2 = np.empty_like(z3)
        for i in range(z3.shape[0]):
            for j in range(z3.shape[1]):
                h2[i, j] = (z3[i, j] if z3[i, j] > 0.0 else 0.0) * m2[i, j]
        logits = _affine(h2, w4, b4)

        k = logits.shape[1]
        dlogits = np.empty_like(logits)
        loss = 0.0
        for i in range(batch):
            mx = logits[i, 0]
            for j in range(1, k):
                if logits[i, j] > mx:
                    mx = logits[i, j]
            denom = 0.0
            for j in range(k):
                dlogits[i, j] = np.exp(logits[i, j] - mx)
                denom += dlogits[i, j]
            for j in range(k):
                dlogits[i, j] /= denom
            loss -= np.log(dlogits[i, y[i]])
            dlogits[i, y[i]] -= 1.0
        loss /= batch
        for i in range(batch):
            for j in range(k):
                dlogits[i, j] /= batch

        gw4 = np.dot(np.ascontiguousarray(h2.T), dlogits)
        gb4 = dlogits.sum(axis=0)
        dh2 = np.dot(dlogits, np.ascontiguousarray(w4.T))
        for i in range(dh2.shape[0]):
            for j in range(dh2.shape[1]):
                dh2[i, j] = dh2[i, j] * m2[i, j] if z3[i, j] > 0.0 else 0.0
        gw3 = np.dot(np.ascontiguousarray(c.T), dh2)
        gb3 = dh2.sum(axis=0)
        dc = np.dot(dh2, np.ascontiguousarray(w3.T))
        gw2 = np.dot(np.ascontiguousarray(h1.T), dc)
        gb2 = dc.sum(axis=0)
        dh1 = np.dot(dc, np.ascontiguousarray(w2.T))
        for i in range(dh1.shape[0]):
            for j in range(dh1.shape[1]):
                dh1[i, j] = dh1[i, j] * m1[i, j] if z1[i, j] > 0.0 else 0.0
        gw1 = np.dot(np.ascontiguousarray(x.T), dh1)
        gb1 = dh1.sum(axis=0)
        return loss, gw1, gb1, gw2, gb2, gw3, gb3, gw4, gb4

    @njit(cache=True)
    def nb_lr_loss_grad(x, y, w, b, l2):
        n, d = x.shape
        z = np.dot(x, w)
        loss = 0.0
        dz = np.empty(n)
        for i in range(n):
            zi = z[i] + b
            m = zi if zi > 0.0 else 0.0
            loss += m - zi * y[i] + np.log1p(np.exp(-abs(zi)))
            dz[i] = (1.0 / (1.0 + np.exp(-zi)) - y[i]) / n
        loss /= n
        for j in range(d):
            loss += 0.5 * l2 * w[j] * w[j]
        gw = np.dot(np.ascontiguousarray(x.T), dz)
        for j in range(d):
            gw[j] += l2 * w[j]
        gb = dz.sum()
        return loss, gw, gb

    return SimpleNamespace(
        fusion_forward=nb_fusion_forward,
        fusion_loss_grads=nb_fusion_loss_grads,
        lr_loss_grad=nb_lr_loss_grad,
        name="numba",
    )


_NUMPY_KERNELS = SimpleNamespace(
    fusion_forward=_np_fusion_forward,
    fusion_loss_grads=_np_fusion_loss_grads,
    lr_loss_grad=_np_lr_loss_grad,
    name="numpy",
)

_numba_cache = None


def kernels_for(backend: str | None = None) -> SimpleNamespace:
    """Kernel namespace for the requested (or environment-selected) backend."""
    global _numba_cache
    resolved = _resolve_backend(backend)
    if resolved == "numpy":
        return _NUMPY_KERNELS
    if _numba_cache is None:
        _numba_cache = _build_numba()
    return _numba_cache


def active_backend() -> str:
    return _resolve_backend(None)
