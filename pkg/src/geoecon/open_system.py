"""
Thermodynamic-length geometry in the space of forcing coefficients.

A quasi-static dissipation rate ``w(lambda, lambda_dot)`` defines the metric

    g_jk(lambda) = beta / 2 * d^2 w / d lambda_dot^j d lambda_dot^k  at lambda_dot = 0

so that a quadratic rate ``w = lambda_dot . G . lambda_dot`` gives back ``G``
(``beta = 1``).  Geodesics of ``g`` minimise the integrated dissipation for a
fixed duration.  Derivatives of the metric are taken by central differences,
so any provider (analytic or rate-derived) can be used.
"""
from __future__ import annotations

import io
from dataclasses import dataclass
from typing import Callable

import numpy as np

from ._expr import Expression
from ._ode import rk4
from .errors import ConfigError, DomainError

FD_STEP = 1e-4
MAX_CONDITION = 1e8

ANALYTIC = "analytic"
FROM_RATE = "from_rate"


@dataclass(frozen=True)
class MetricProvider:
    """Symmetric positive-semidefinite metric as a function of ``lambda``."""

    alpha: int
    evaluate: Callable
    kind: str = ANALYTIC

    def __call__(self, lam):
        g = np.atleast_2d(np.asarray(self.evaluate(np.asarray(lam, dtype=float)), dtype=float))
        if g.shape != (self.alpha, self.alpha):
            raise DomainError(f"metric has shape {g.shape}, expected {(self.alpha, self.alpha)}")
        if not np.all(np.isfinite(g)):
            raise DomainError(f"non-finite metric at lambda={lam}")
        return 0.5 * (g + g.T)


@dataclass(frozen=True)
class RateModel:
    """Dissipation rate ``rate(lambda, lambda_dot)`` at inverse temperature ``beta``."""

    beta: float
    rate: Callable

    def __post_init__(self):
        if not self.beta > 0:
            raise DomainError("beta must be positive")


@dataclass(frozen=True)
class ControlPath:
    times: np.ndarray
    values: np.ndarray  # shape (n_samples, alpha)
    truncated: bool = False
    velocities: np.ndarray | None = None  # set by the geodesic integrator

    def __post_init__(self):
        t = np.asarray(self.times, dtype=float)
        v = np.asarray(self.values, dtype=float)
        if v.ndim == 1:
            v = v[:, None]
        if t.ndim != 1 or t.size < 2 or v.shape[0] != t.size:
            raise DomainError("a control path needs >= 2 samples with matching times")
        if np.any(np.diff(t) <= 0):
            raise DomainError("control path times must increase strictly")
        object.__setattr__(self, "times", t)
        object.__setattr__(self, "values", v)

    @property
    def alpha(self):
        return self.values.shape[1]


def _h(lam, fd_step):
    return fd_step * (np.abs(lam) + 1.0)


def metric_from_rate(model: RateModel, lam, fd_step=FD_STEP):
    """Velocity Hessian of the rate at zero velocity, times ``beta / 2``."""
    lam = np.atleast_1d(np.asarray(lam, dtype=float))
    alpha = lam.size
    h = fd_step * (1.0 + np.max(np.abs(lam)))

    def w(v):
        val = float(model.rate(lam, v))
        if not np.isfinite(val):
            raise DomainError(f"non-finite rate at lambda={lam}, velocity={v}")
        return val

    eye = np.eye(alpha) * h
    hess = np.empty((alpha, alpha))
    w0 = w(np.zeros(alpha))
    for j in range(alpha):
        hess[j, j] = (w(eye[j]) - 2 * w0 + w(-eye[j])) / h**2
        for k in range(j):
            val = (
                w(eye[j] + eye[k]) - w(eye[j] - eye[k]) - w(eye[k] - eye[j]) + w(-eye[j] - eye[k])
            ) / (4 * h**2)
            hess[j, k] = hess[k, j] = val
    return 0.5 * model.beta * hess


def provider_from_rate(model: RateModel, alpha: int, fd_step=FD_STEP) -> MetricProvider:
    return MetricProvider(alpha, lambda lam: metric_from_rate(model, lam, fd_step), FROM_RATE)


def constant_metric(g) -> MetricProvider:
    g = np.atleast_2d(np.asarray(g, dtype=float))
    return MetricProvider(g.shape[0], lambda lam: g)


def inverse_square_metric() -> MetricProvider:
    """1-D example ``g(lambda) = 1 / lambda^2``; geodesics are exponentials."""
    return MetricProvider(1, lambda lam: np.array([[1.0 / lam[0] ** 2]]))


def bell_metric(beta=1.0, width=1.0) -> MetricProvider:
    """1-D example ``g(lambda) = beta sech^2(lambda / width)``."""
    return MetricProvider(1, lambda lam: np.array([[beta / np.cosh(lam[0] / width) ** 2]]))


def _lambda_names(alpha):
    return [f"lambda_{j + 1}" for j in range(alpha)]


def provider_from_expr(expr: str, alpha: int, kind=ANALYTIC, beta=1.0, fd_step=FD_STEP):
    """Metric provider from a config expression.

    For ``kind="analytic"`` the text is either one expression (a conformal
    factor times the identity) or ``alpha**2`` expressions separated by ``;``
    (row-major matrix), in the variables ``lambda_1 .. lambda_alpha``.
    For ``kind="from_rate"`` it is the dissipation rate in ``lambda_j`` and
    ``dlambda_j`` and the metric follows from :func:`metric_from_rate`.
    """
    if alpha < 1:
        raise ConfigError("metric.alpha must be >= 1")
    names = _lambda_names(alpha)
    if kind == ANALYTIC:
        parts = [Expression(p, names) for p in expr.split(";")]
        if len(parts) not in (1, alpha * alpha):
            raise ConfigError(f"metric.expr needs 1 or {alpha * alpha} entries, got {len(parts)}")

        def evaluate(lam):
            env = dict(zip(names, map(float, lam)))
            vals = [p(**env) for p in parts]
            if len(vals) == 1:
                return vals[0] * np.eye(alpha)
            return np.array(vals).reshape(alpha, alpha)

        return MetricProvider(alpha, evaluate, ANALYTIC)
    if kind == FROM_RATE:
        vnames = [f"d{n}" for n in names]
        rate_expr = Expression(expr, names + vnames)

        def rate(lam, v):
            env = dict(zip(names, map(float, lam)))
            env.update(zip(vnames, map(float, v)))
            return rate_expr(**env)

        return provider_from_rate(RateModel(beta, rate), alpha, fd_step)
    raise ConfigError(f"unknown metric.kind {kind!r}")


def metric_derivatives(p: MetricProvider, lam, fd_step=FD_STEP):
    """``dg[m, j, k] = d g_jk / d lambda^m`` by central differences."""
    lam = np.atleast_1d(np.asarray(lam, dtype=float))
    h = _h(lam, fd_step)
    dg = np.empty((p.alpha, p.alpha, p.alpha))
    for m in range(p.alpha):
        e = np.zeros(p.alpha)
        e[m] = h[m]
        dg[m] = (p(lam + e) - p(lam - e)) / (2 * h[m])
    return dg


def christoffel_fd(p: MetricProvider, lam, fd_step=FD_STEP):
    """Levi-Civita symbols ``Gamma[j, k, l]`` (upper index first)."""
    g = p(lam)
    ev = np.linalg.eigvalsh(g)
    if ev[0] <= 0 or ev[-1] >= MAX_CONDITION * ev[0]:
        raise DomainError(f"metric is singular at lambda={lam}")
    g_inv = np.linalg.inv(g)
    dg = metric_derivatives(p, lam, fd_step)
    # lower[m, k, l] = d_l g_km + d_k g_lm - d_m g_kl
    lower = np.einsum("lkm->mkl", dg) + np.einsum("klm->mkl", dg) - dg
    return 0.5 * np.einsum("jm,mkl->jkl", g_inv, lower)


def integrate_geodesic_open(p: MetricProvider, lam0, v0, duration, step=1e-3, fd_step=FD_STEP):
    """RK4 integration of the geodesic equation in forcing space.

    If the metric turns singular the path is returned up to the last good
    sample with ``truncated=True``.
    """
    lam0 = np.atleast_1d(np.asarray(lam0, dtype=float))
    v0 = np.atleast_1d(np.asarray(v0, dtype=float))
    a = p.alpha
    if lam0.shape != (a,) or v0.shape != (a,):
        raise DomainError(f"initial point and velocity need {a} components")

    def rhs(t, y):
        lam, v = y[:a], y[a:]
        with np.errstate(over="raise", divide="raise", invalid="raise"):
            gamma = christoffel_fd(p, lam, fd_step)
            return np.concatenate([v, -np.einsum("jkl,k,l->j", gamma, v, v)])

    times, states = [], []

    def record(t, y):
        times.append(t)
        states.append(y.copy())

    truncated = False
    try:
        rk4(rhs, np.concatenate([lam0, v0]), 0.0, duration, step, callback=record)
    except (DomainError, FloatingPointError):
        truncated = True
    if len(times) < 2:
        raise DomainError("metric singular at the start of the path")
    states = np.array(states)
    return ControlPath(np.array(times), states[:, :a], truncated, states[:, a:])


def _edge_slope(d_near, d_far, h_near, h_far):
    """One-sided second-order slope at an end point from its two adjacent differences."""
    return (d_near / h_near * (2 * h_near + h_far) - d_far / h_far * h_near) / (h_near + h_far)


def path_velocities(path: ControlPath):
    """Second-order finite-difference velocities on a possibly uneven time grid.

    Written in terms of sample differences, so a constant path has exactly
    zero velocity.
    """
    d = np.diff(path.values, axis=0)
    h = np.diff(path.times)[:, None]
    if path.times.size < 3:
        return np.repeat(d / h, 2, axis=0)
    h0, h1, d0, d1 = h[:-1], h[1:], d[:-1], d[1:]
    inner = (d0 * (h1 / h0) + d1 * (h0 / h1)) / (h0 + h1)
    first = _edge_slope(d[:1], d[1:2], h[:1], h[1:2])
    last = _edge_slope(d[-1:], d[-2:-1], h[-1:], h[-2:-1])
    return np.concatenate([first, inner, last])


def dissipation_rate(p: MetricProvider, path: ControlPath):
    """``lambda_dot . g . lambda_dot`` at every sample."""
    vel = path_velocities(path)
    return np.array([v @ p(lam) @ v for lam, v in zip(path.values, vel)])


def dissipation_integral(p: MetricProvider, path: ControlPath):
    """Trapezoidal time integral of the dissipation rate."""
    if path.times.size < 3:
        raise DomainError("dissipation needs at least three samples")
    rate = dissipation_rate(p, path)
    return float(np.sum(0.5 * (rate[1:] + rate[:-1]) * np.diff(path.times)))


def write_path_csv(path: ControlPath, fh):
    names = ",".join(f"lambda_{j + 1}" for j in range(path.alpha))
    fh.write(f"t,{names}\n")
    for t, row in zip(path.times, path.values):
        fh.write(",".join([repr(float(t))] + [repr(float(x)) for x in row]) + "\n")


def path_to_csv(path: ControlPath) -> str:
    buf = io.StringIO()
    write_path_csv(path, buf)
    return buf.getvalue()


def read_path_csv(text: str) -> ControlPath:
    lines = [ln for ln in text.splitlines() if ln.strip() and not ln.startswith("#")]
    if not lines or not lines[0].startswith("t,"):
        raise DomainError("control path CSV must start with a 't,lambda_1,...' header")
    try:
        data = np.array([[float(x) for x in ln.split(",")] for ln in lines[1:]])
    except ValueError as exc:
        raise DomainError(f"bad control path CSV: {exc}") from None
    if data.ndim != 2 or data.shape[1] != len(lines[0].split(",")):
        raise DomainError("control path CSV has ragged rows")
    return ControlPath(data[:, 0], data[:, 1:])
