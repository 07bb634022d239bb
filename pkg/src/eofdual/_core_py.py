"""Pure-numpy fallback for the hot entropy/gradient kernel.

Same contract as the compiled ``eofdual._core`` extension; the batch axis
is vectorized through numpy's stacked ``eigh``.
"""

from __future__ import annotations

import numpy as np

COMPILED = False


def entropy_and_gradient(w: np.ndarray, floor: float = 1e-12):
    """Entropy-scale objective and its Wirtinger gradient for a batch.

    ``w`` has shape (k, da, db): a stack of (generally unnormalized) matrix
    views of bipartite vectors. With sigma_i = w_i w_i' and p_i = Tr(sigma_i),
    the returned value is

        sum_i [ p_i*log2(p_i) - sum_j mu_ij*log2(mu_ij) ]

    over eigenvalues mu of sigma_i with mu/p_i above ``floor``, i.e. the
    weighted reduced-state entropy sum p_i * S(sigma_i / p_i).  The gradient
    with respect to conj(w_i) is -log2(sigma_i / p_i) @ w_i restricted to
    the support.  For a single normalized state this is the pure-state
    entanglement and its gradient.
    """
    w = np.ascontiguousarray(w, dtype=np.complex128)
    if w.ndim != 3:
        raise ValueError(f"expected shape (k, da, db), got {w.shape}")
    sigma = w @ w.conj().transpose(0, 2, 1)
    vals, vecs = np.linalg.eigh(sigma)
    mu = np.clip(vals, 0.0, None)
    p = mu.sum(axis=1)
    alive = p > 0.0
    ratio = np.zeros_like(mu)
    ratio[alive] = mu[alive] / p[alive, None]
    mask = ratio > floor

    logs = np.zeros_like(mu)
    np.log2(ratio, out=logs, where=mask)

    # p*log2(p) - sum mu*log2(mu) == -sum mu*log2(mu/p) on the support
    value = float(-(mu * logs)[mask].sum())

    proj = vecs.conj().transpose(0, 2, 1) @ w
    grad = -(vecs @ (logs[:, :, None] * proj))
    return value, np.ascontiguousarray(grad)
