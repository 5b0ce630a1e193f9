"""Pure numpy implementation of the Matérn-5/2 ARD hot kernels.

Used when the compiled extension is unavailable or disabled with
``TURBO_PURE_PYTHON=1``. Must agree with ``_kernels.pyx`` to rounding.
"""

import numpy as np

SQRT5 = np.sqrt(5.0)


def _scaled_distance(X1, X2, lengthscales):
    A = X1 / lengthscales
    B = X2 / lengthscales
    sq = (A * A).sum(1)[:, None] + (B * B).sum(1)[None, :] - 2.0 * A @ B.T
    np.maximum(sq, 0.0, out=sq)
    return np.sqrt(sq)


def matern52(X1, X2, lengthscales, signal_variance):
    """Cross-covariance matrix ``k(X1[i], X2[j])``."""
    # expanded-square distance loses precision for near-identical points, so
    # fall back to explicit differences when the problem is small enough
    if X1.shape[0] * X2.shape[0] * X1.shape[1] <= 4_000_000:
        diff = (X1[:, None, :] - X2[None, :, :]) / lengthscales
        r = np.sqrt(np.einsum("ijk,ijk->ij", diff, diff))
    else:
        r = _scaled_distance(X1, X2, lengthscales)
    sr = SQRT5 * r
    return signal_variance * (1.0 + sr + sr * sr / 3.0) * np.exp(-sr)


def matern52_lengthscale_grad(X, lengthscales, signal_variance, W):
    """Return ``sum_ij W[i, j] * dK[i, j] / dlog(lengthscale_k)`` for each k.

    ``W`` must be symmetric; ``K = matern52(X, X, ...)``.
    """
    diff = (X[:, None, :] - X[None, :, :]) / lengthscales
    sq = diff * diff
    r = np.sqrt(sq.sum(-1))
    sr = SQRT5 * r
    factor = (5.0 / 3.0) * signal_variance * (1.0 + sr) * np.exp(-sr)
    return np.einsum("ij,ijk->k", W * factor, sq)


def matern52_symmetric(X, lengthscales, signal_variance):
    """``matern52(X, X, ...)`` with an exactly symmetric result and diagonal."""
    K = matern52(X, X, lengthscales, signal_variance)
    K = 0.5 * (K + K.T)
    np.fill_diagonal(K, signal_variance)
    return K
