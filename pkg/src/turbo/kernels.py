"""Backend selection for the Matérn-5/2 hot kernels.

The compiled extension ``turbo._kernels`` is used when it imports; otherwise,
or when the environment variable ``TURBO_PURE_PYTHON`` is set to a non-empty
value other than ``0``, the numpy implementation in ``turbo._kernels_py``
is used. ``BACKEND`` names the active one.
"""

import os

import numpy as np

from . import _kernels_py

_impl = _kernels_py
BACKEND = "python"

if os.environ.get("TURBO_PURE_PYTHON", "0") in ("", "0"):
    try:
        from . import _kernels as _compiled
    except ImportError:  # extension not built
        pass
    else:
        _impl = _compiled
        BACKEND = "cython"


def _as_c(a):
    return np.ascontiguousarray(a, dtype=np.float64)


def matern52(X1, X2, lengthscales, signal_variance, impl=None):
    """Matérn-5/2 ARD cross-covariance between the rows of ``X1`` and ``X2``.

    Parameters
    ----------
    X1, X2 : ndarray, shape (n1, d) and (n2, d)
    lengthscales : ndarray, shape (d,)
    signal_variance : float
    impl : module, optional
        Force a backend module (used by the benchmark and parity tests).
    """
    impl = impl or _impl
    return impl.matern52(_as_c(X1), _as_c(X2), _as_c(lengthscales), float(signal_variance))


def matern52_symmetric(X, lengthscales, signal_variance, impl=None):
    """Covariance matrix of the rows of ``X``; exactly symmetric, diagonal = signal variance."""
    impl = impl or _impl
    return impl.matern52_symmetric(_as_c(X), _as_c(lengthscales), float(signal_variance))


def matern52_lengthscale_grad(X, lengthscales, signal_variance, W, impl=None):
    """Contract ``W`` against ``dK/dlog(lengthscale_k)`` for every dimension k."""
    impl = impl or _impl
    return impl.matern52_lengthscale_grad(
        _as_c(X), _as_c(lengthscales), float(signal_variance), _as_c(W)
    )


def available_backends():
    """Map of backend name to implementation module, for benchmarking."""
    out = {"python": _kernels_py}
    try:
        from . import _kernels as compiled
    except ImportError:
        return out
    out["cython"] = compiled
    return out
