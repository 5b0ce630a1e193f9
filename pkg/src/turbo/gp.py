"""Exact Gaussian-process regression with a Matérn-5/2 ARD kernel.

Inputs live in the unit cube and targets are z-scored per model, so every
hyperparameter below is in unit-cube / standardized-output units. The mean
function is a constant fixed at zero in standardized space.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import LinAlgError, cho_solve, cholesky, lapack, solve_triangular
from scipy.optimize import minimize

from . import kernels
from .exceptions import NumericalError

LENGTHSCALE_BOUNDS = (0.005, 2.0)
SIGNAL_VARIANCE_BOUNDS = (0.05, 20.0)
NOISE_VARIANCE_BOUNDS = (0.0005, 0.1)

JITTER_LADDER = (0.0, 1e-8, 1e-7, 1e-6, 1e-5, 1e-4)
MIN_STD = 1e-12
LOG_2PI = np.log(2.0 * np.pi)


@dataclass(frozen=True)
class KernelParams:
    """Hyperparameters of a Matérn-5/2 ARD GP.

    Parameters
    ----------
    lengthscales : ndarray, shape (d,)
        Per-dimension lengthscales in unit-cube coordinates.
    signal_variance : float
    noise_variance : float
    mean_constant : float
        Constant prior mean in standardized units (kept at 0 when fitting).
    """

    lengthscales: np.ndarray
    signal_variance: float
    noise_variance: float
    mean_constant: float = 0.0

    def __post_init__(self):
        ls = np.atleast_1d(np.asarray(self.lengthscales, dtype=float)).copy()
        ls.setflags(write=False)
        object.__setattr__(self, "lengthscales", ls)
        object.__setattr__(self, "signal_variance", float(self.signal_variance))
        object.__setattr__(self, "noise_variance", float(self.noise_variance))
        object.__setattr__(self, "mean_constant", float(self.mean_constant))

    @property
    def dim(self) -> int:
        return self.lengthscales.shape[0]

    @classmethod
    def default(cls, d: int) -> KernelParams:
        return cls(np.full(d, 0.5), 1.0, 0.005)

    def in_bounds(self) -> bool:
        lo, hi = LENGTHSCALE_BOUNDS
        return bool(
            np.all((self.lengthscales >= lo) & (self.lengthscales <= hi))
            and SIGNAL_VARIANCE_BOUNDS[0] <= self.signal_variance <= SIGNAL_VARIANCE_BOUNDS[1]
            and NOISE_VARIANCE_BOUNDS[0] <= self.noise_variance <= NOISE_VARIANCE_BOUNDS[1]
        )

    def clamped(self) -> KernelParams:
        return KernelParams(
            np.clip(self.lengthscales, *LENGTHSCALE_BOUNDS),
            np.clip(self.signal_variance, *SIGNAL_VARIANCE_BOUNDS),
            np.clip(self.noise_variance, *NOISE_VARIANCE_BOUNDS),
            self.mean_constant,
        )

    def to_log(self) -> np.ndarray:
        """Flatten to ``[log lengthscales..., log signal_var, log noise_var]``."""
        return np.log(np.r_[self.lengthscales, self.signal_variance, self.noise_variance])

    @classmethod
    def from_log(cls, theta, mean_constant=0.0) -> KernelParams:
        v = np.exp(np.asarray(theta, dtype=float))
        return cls(v[:-2], v[-2], v[-1], mean_constant)


def log_bounds(d: int) -> np.ndarray:
    """Box for the log-parameter vector, shape (d + 2, 2)."""
    rows = [LENGTHSCALE_BOUNDS] * d + [SIGNAL_VARIANCE_BOUNDS, NOISE_VARIANCE_BOUNDS]
    return np.log(np.array(rows, dtype=float))


@dataclass(frozen=True)
class StandardizationStats:
    mean: float
    std_dev: float

    @classmethod
    def from_values(cls, y) -> StandardizationStats:
        y = np.asarray(y, dtype=float)
        std = float(y.std()) if y.size > 1 else 0.0
        if std < MIN_STD:
            std = 1.0
        return cls(float(y.mean()), std)

    def standardize(self, y):
        return (np.asarray(y, dtype=float) - self.mean) / self.std_dev

    def unstandardize(self, z):
        return self.mean + self.std_dev * np.asarray(z, dtype=float)


@dataclass(frozen=True)
class GPModel:
    """A GP conditioned on its training data; immutable once built."""

    train_inputs: np.ndarray
    train_targets_standardized: np.ndarray
    params: KernelParams
    stats: StandardizationStats
    chol_factor: np.ndarray
    alpha: np.ndarray = field(repr=False)
    jitter: float = 0.0

    @property
    def n(self) -> int:
        return self.train_inputs.shape[0]

    def predict_mean(self, X) -> np.ndarray:
        """Posterior mean at ``X`` in raw objective units."""
        Ks = matern52_matrix(self.train_inputs, np.atleast_2d(X), self.params)
        return self.stats.unstandardize(self.params.mean_constant + Ks.T @ self.alpha)


@dataclass(frozen=True)
class Posterior:
    """Joint GP posterior on a finite set of points, in standardized units."""

    mean: np.ndarray
    covariance: np.ndarray


def matern52_ard(x, x_prime, params: KernelParams) -> float:
    """Matérn-5/2 ARD covariance between two points."""
    x = np.asarray(x, dtype=float)
    x_prime = np.asarray(x_prime, dtype=float)
    if not (np.all(np.isfinite(x)) and np.all(np.isfinite(x_prime))):
        raise ValueError("kernel inputs must be finite")
    r = np.sqrt(np.sum(((x - x_prime) / params.lengthscales) ** 2))
    sr = np.sqrt(5.0) * r
    return float(params.signal_variance * (1.0 + sr + sr * sr / 3.0) * np.exp(-sr))


def matern52_matrix(X1, X2, params: KernelParams) -> np.ndarray:
    return kernels.matern52(X1, X2, params.lengthscales, params.signal_variance)


def kernel_matrix(X, params: KernelParams) -> np.ndarray:
    """Covariance matrix of the rows of ``X`` (noise not included)."""
    X = np.atleast_2d(np.asarray(X, dtype=float))
    if X.shape[0] < 1:
        raise ValueError("kernel_matrix needs at least one point")
    if not np.all(np.isfinite(X)):
        raise ValueError("kernel inputs must be finite")
    return kernels.matern52_symmetric(X, params.lengthscales, params.signal_variance)


def cholesky_with_jitter(A, what="matrix"):
    """Lower Cholesky factor of ``A + jitter*I`` for the first jitter that works.

    Returns ``(L, jitter)``; raises :class:`NumericalError` when the ladder
    is exhausted.
    """
    eye = np.eye(A.shape[0])
    for jitter in JITTER_LADDER:
        try:
            L = cholesky(A + jitter * eye if jitter else A, lower=True, check_finite=False)
        except LinAlgError:
            continue
        if np.all(np.isfinite(L)):
            return L, jitter
    raise NumericalError(f"Cholesky of {what} failed", JITTER_LADDER[-1])


def _inverse_from_cholesky(L):
    inv, info = lapack.dpotri(L, lower=1)
    if info != 0:
        raise NumericalError("inverse from Cholesky factor failed", 0.0)
    # dpotri fills the lower triangle only
    return np.tril(inv) + np.tril(inv, -1).T


def log_marginal_likelihood(X, y_standardized, params: KernelParams, return_grad=False):
    """Log marginal likelihood of standardized targets under ``params``.

    With ``return_grad`` also returns the gradient with respect to
    ``params.to_log()``.
    """
    X = np.atleast_2d(np.asarray(X, dtype=float))
    z = np.asarray(y_standardized, dtype=float) - params.mean_constant
    n = X.shape[0]
    if z.shape != (n,):
        raise ValueError(f"expected {n} targets, got shape {z.shape}")
    Kf = kernel_matrix(X, params)
    K = Kf + params.noise_variance * np.eye(n)
    L, _ = cholesky_with_jitter(K, "K + noise*I")
    alpha = cho_solve((L, True), z, check_finite=False)
    lml = -0.5 * z @ alpha - np.log(np.diag(L)).sum() - 0.5 * n * LOG_2PI
    if not return_grad:
        return float(lml)

    Kinv = _inverse_from_cholesky(L)
    W = np.outer(alpha, alpha) - Kinv
    grad = np.empty(params.dim + 2)
    grad[:-2] = 0.5 * kernels.matern52_lengthscale_grad(
        X, params.lengthscales, params.signal_variance, W
    )
    grad[-2] = 0.5 * np.sum(W * Kf)
    grad[-1] = 0.5 * params.noise_variance * np.trace(W)
    return float(lml), grad


def build_model(X, y_raw, params: KernelParams) -> GPModel:
    """Condition a GP with fixed hyperparameters on raw observations."""
    X = np.atleast_2d(np.asarray(X, dtype=float))
    y_raw = np.asarray(y_raw, dtype=float).ravel()
    if X.shape[0] < 1 or X.shape[0] != y_raw.shape[0]:
        raise ValueError("need matching, non-empty X and y")
    stats = StandardizationStats.from_values(y_raw)
    z = stats.standardize(y_raw)
    K = kernel_matrix(X, params) + params.noise_variance * np.eye(X.shape[0])
    L, jitter = cholesky_with_jitter(K, "K + noise*I")
    alpha = cho_solve((L, True), z - params.mean_constant, check_finite=False)
    return GPModel(X.copy(), z, params, stats, L, alpha, jitter)


def fit_hyperparameters(
    X, y_raw, init: KernelParams | None = None, budget: int = 50, rng=None, multistart: bool = True
) -> GPModel:
    """Fit hyperparameters by maximizing the log marginal likelihood.

    L-BFGS-B runs in log space inside the hyperparameter box from three
    starts: ``init`` (clamped), the log-center of the box, and a random
    point drawn from ``rng``. With ``multistart=False`` only ``init`` is
    used. ``budget`` caps iterations per start; with ``budget=0`` the model
    is built at the clamped ``init``.
    """
    X = np.atleast_2d(np.asarray(X, dtype=float))
    d = X.shape[1]
    y_raw = np.asarray(y_raw, dtype=float).ravel()
    if init is None:
        init = KernelParams.default(d)
    init = KernelParams(init.lengthscales, init.signal_variance, init.noise_variance, 0.0).clamped()
    if budget <= 0:
        return build_model(X, y_raw, init)
    rng = np.random.default_rng(0) if rng is None else rng

    z = StandardizationStats.from_values(y_raw).standardize(y_raw)
    bounds = log_bounds(d)

    def neg_lml(theta):
        theta = np.clip(theta, bounds[:, 0], bounds[:, 1])
        try:
            val, grad = log_marginal_likelihood(X, z, KernelParams.from_log(theta), return_grad=True)
        except NumericalError:
            return 1e25, np.zeros_like(theta)
        return -val, -grad

    starts = [init.to_log()]
    if multistart:
        starts += [bounds.mean(axis=1), rng.uniform(bounds[:, 0], bounds[:, 1])]
    best_theta = starts[0]
    best_val = neg_lml(best_theta)[0]
    for theta0 in starts:
        res = minimize(
            neg_lml,
            theta0,
            jac=True,
            method="L-BFGS-B",
            bounds=bounds,
            options={"maxiter": int(budget)},
        )
        if np.isfinite(res.fun) and res.fun < best_val:
            best_val, best_theta = res.fun, res.x
    theta = np.clip(best_theta, bounds[:, 0], bounds[:, 1])
    return build_model(X, y_raw, KernelParams.from_log(theta).clamped())


def posterior(model: GPModel, candidates, full_cov=True) -> Posterior:
    """Posterior of the latent function at ``candidates`` (standardized units).

    With ``full_cov=False`` only the diagonal is returned (as a 1-D array in
    ``covariance``).
    """
    C = np.atleast_2d(np.asarray(candidates, dtype=float))
    p = model.params
    Ks = matern52_matrix(model.train_inputs, C, p)
    mean = p.mean_constant + Ks.T @ model.alpha
    V = solve_triangular(model.chol_factor, Ks, lower=True, check_finite=False)
    if not full_cov:
        var = np.maximum(p.signal_variance - np.einsum("ij,ij->j", V, V), 0.0)
        return Posterior(mean, var)
    cov = kernel_matrix(C, p) - V.T @ V
    cov = 0.5 * (cov + cov.T)
    diag = np.einsum("ii->i", cov)
    np.maximum(diag, 0.0, out=diag)
    return Posterior(mean, cov)


def posterior_factor(post: Posterior) -> np.ndarray:
    """Lower factor ``L`` with ``L @ L.T = covariance + jitter*I``.

    An all-zero covariance yields an all-zero factor.
    """
    cov = post.covariance
    if not np.any(cov):
        return np.zeros_like(cov)
    L, _ = cholesky_with_jitter(cov, "posterior covariance")
    return L


def sample_joint(post: Posterior, count: int, rng) -> np.ndarray:
    """Draw ``count`` joint samples, shape ``(count, r)``."""
    if count < 1:
        raise ValueError("count must be positive")
    L = posterior_factor(post)
    eta = rng.standard_normal((post.mean.shape[0], count))
    return (post.mean[:, None] + L @ eta).T
