"""
Entropy geometry of a single qubit and the unsustainability field.

The metric is the negative Hessian of the von Neumann entropy in Bloch
coordinates.  Everything depends on ``r`` only through ``x = |r|`` and the
outer products of ``r``, using three radial functions

    f(x) = artanh(x) / x
    C(x) = (1 / (1 - x^2) - f(x)) / x^2
    D(x) = C'(x) / x

so that

    g_jk    = f delta_jk + C r_j r_k
    g^jk    = delta_jk / f - (1 - x^2) C / f r_j r_k
    Gamma_jkl = C/2 (r_j delta_kl + r_k delta_jl + r_l delta_jk) + D/2 r_j r_k r_l

Near the origin f, C and D are evaluated from their power series, which
removes the 0/0 and the cancellation in ``C`` and ``D``.

Functions accept a single point ``(3,)`` or a batch ``(..., 3)`` unless
noted.  Batch evaluation is elementwise (no BLAS), so a cell's value does not
depend on how a grid is partitioned.
"""
from __future__ import annotations

import concurrent.futures
import io
from dataclasses import dataclass

import numpy as np

from ._ode import rk4
from .errors import DomainError
from .qubit import PAPER, SOURCES, trajectory, trajectory_derivatives

R_MAX = 0.999
SERIES_BELOW = 0.05
A_THRESHOLD = 0.01
DEFAULT_DELTAS = (0.1, 0.2, 0.5, 1.0)
FIG2_FRACTIONS = (0.0, 0.2, 0.4, 0.6, 0.8)

_K = np.arange(1, 14)
# artanh(x)/x = sum x^(2k-2)/(2k-1)
_F_SERIES = 1.0 / (2 * _K - 1)
# C(x) = sum_{k>=1} 2k/(2k+1) x^(2k-2)
_C_SERIES = 2 * _K / (2 * _K + 1)
# D(x) = sum_{k>=2} 2k(2k-2)/(2k+1) x^(2k-4)
_D_SERIES = (2 * (_K + 1) * 2 * _K / (2 * _K + 3))


def _poly_x2(coeffs, x2):
    out = np.zeros_like(x2)
    for c in coeffs[::-1]:
        out = out * x2 + c
    return out


def radial_functions(x):
    """Return ``f, C, D`` evaluated at radii ``x`` (array, ``0 <= x < 1``)."""
    x = np.asarray(x, dtype=float)
    x2 = x * x
    small = x < SERIES_BELOW
    with np.errstate(divide="ignore", invalid="ignore"):
        f = np.where(small, _poly_x2(_F_SERIES, x2), np.arctanh(x) / x)
        inv = 1.0 / (1.0 - x2)
        b = inv - f
        c = np.where(small, _poly_x2(_C_SERIES, x2), b / x2)
        d = np.where(
            small,
            _poly_x2(_D_SERIES, x2),
            2.0 * inv * inv / x2 - 3.0 * b / (x2 * x2),
        )
    return f, c, d


def _norm(r):
    return np.sqrt(r[..., 0] ** 2 + r[..., 1] ** 2 + r[..., 2] ** 2)


def _dot(a, b):
    return a[..., 0] * b[..., 0] + a[..., 1] * b[..., 1] + a[..., 2] * b[..., 2]


def _check_radius(x, bound, strict, what):
    bad = x >= bound if strict else x > bound
    if np.any(bad):
        rel = "<" if strict else "<="
        raise DomainError(f"{what} needs |r| {rel} {bound}, got {np.max(x)}")


def entropy(r):
    """Von Neumann entropy (natural log) of the qubit state with Bloch vector ``r``."""
    r = np.asarray(r, dtype=float)
    x = _norm(r)
    _check_radius(x, 1.0 + 1e-12, False, "entropy")
    x = np.minimum(x, 1.0)
    out = np.zeros_like(x)
    for xi in ((1 + x) / 2, (1 - x) / 2):
        pos = xi > 0
        out = out - np.where(pos, xi * np.log(np.where(pos, xi, 1.0)), 0.0)
    return out[()] if out.ndim == 0 else out


def dual_coords(r):
    """Dual coordinates ``chi = -grad S = r artanh|r| / |r|``."""
    r = np.asarray(r, dtype=float)
    x = _norm(r)
    _check_radius(x, 1.0, True, "dual_coords")
    f, _, _ = radial_functions(x)
    return r * f[..., None]


def chi_to_r(chi):
    """Inverse of :func:`dual_coords`: ``r = tanh|chi| chi / |chi|``."""
    chi = np.asarray(chi, dtype=float)
    c = _norm(chi)
    with np.errstate(invalid="ignore", divide="ignore"):
        ratio = np.where(c > 0, np.tanh(c) / np.where(c > 0, c, 1.0), 1.0)
    return chi * ratio[..., None]


def legendre_F(r):
    """Legendre transform ``F = S(r) + r . chi(r)``."""
    r = np.asarray(r, dtype=float)
    return entropy(r) + _dot(r, dual_coords(r))


@dataclass(frozen=True)
class MetricAtPoint:
    at: np.ndarray
    g_cov: np.ndarray
    g_contra: np.ndarray


def metric_arrays(r, r_max=R_MAX):
    """Covariant and contravariant metric, shapes ``(..., 3, 3)``."""
    r = np.asarray(r, dtype=float)
    x = _norm(r)
    _check_radius(x, r_max, False, "metric")
    f, c, _ = radial_functions(x)
    eye = np.eye(3)
    rr = r[..., :, None] * r[..., None, :]
    g_cov = f[..., None, None] * eye + c[..., None, None] * rr
    g_contra = eye / f[..., None, None] - ((1 - x * x) * c / f)[..., None, None] * rr
    return g_cov, g_contra


def metric(r, r_max=R_MAX) -> MetricAtPoint:
    """Metric at a single Bloch vector.

    The contravariant form is the exact inverse of the covariant one; it is
    algebraically the same as ``(1 - x^2) rhat rhat + x/artanh(x) (I - rhat rhat)``
    but stays finite at ``r = 0``.
    """
    r = np.asarray(r, dtype=float)
    if r.shape != (3,):
        raise DomainError("metric takes a single Bloch vector; use metric_arrays for batches")
    g_cov, g_contra = metric_arrays(r, r_max)
    return MetricAtPoint(r.copy(), g_cov, g_contra)


def christoffel(r, r_max=R_MAX):
    """Fully covariant Christoffel symbols ``Gamma_jkl = -1/2 d^3 S``, shape ``(..., 3, 3, 3)``."""
    r = np.asarray(r, dtype=float)
    x = _norm(r)
    _check_radius(x, r_max, False, "christoffel")
    _, c, d = radial_functions(x)
    eye = np.eye(3)
    rj = r[..., :, None, None]
    rk = r[..., None, :, None]
    rl = r[..., None, None, :]
    sym = rj * eye[None, :, :] + rk * eye[:, None, :] + rl * eye[:, :, None]
    return 0.5 * c[..., None, None, None] * sym + 0.5 * d[..., None, None, None] * rj * rk * rl


def _contract(r, v, f, c, d):
    """``Gamma_klm v^l v^m`` (lowered index k), elementwise."""
    rv = _dot(r, v)
    vv = _dot(v, v)
    return (
        0.5 * c[..., None] * (r * vv[..., None] + 2.0 * v * rv[..., None])
        + 0.5 * (d * rv * rv)[..., None] * r
    )


def _raise(r, w, x, f, c):
    """``g^jk w_k`` elementwise."""
    return w / f[..., None] - ((1 - x * x) * c / f * _dot(r, w))[..., None] * r


def geodesic_acceleration(r, v):
    """``-g^jk Gamma_klm v^l v^m`` with no domain check (finite for |r| < 1)."""
    r = np.asarray(r, dtype=float)
    v = np.asarray(v, dtype=float)
    x = _norm(r)
    f, c, d = radial_functions(x)
    return -_raise(r, _contract(r, v, f, c, d), x, f, c)


def geodesic_residual(r, velocity, acceleration, r_max=R_MAX):
    """Left-hand side of the geodesic equation and its Euclidean norm.

    Returns
    -------
    residual : ndarray, shape like ``r``
    A : float or ndarray
        Unsustainability estimate ``|residual|``.
    """
    r = np.asarray(r, dtype=float)
    x = _norm(r)
    _check_radius(x, r_max, False, "geodesic_residual")
    res = np.asarray(acceleration, dtype=float) - geodesic_acceleration(r, velocity)
    a = _norm(res)
    return res, (a[()] if a.ndim == 0 else a)


@dataclass(frozen=True)
class GeodesicPath:
    times: np.ndarray
    positions: np.ndarray
    velocities: np.ndarray
    hit_boundary: bool


def integrate_geodesic(r0, v0, duration, step=1e-3, r_max=R_MAX) -> GeodesicPath:
    """RK4 integration of the sustainability geodesic equation.

    Stops early, with ``hit_boundary=True``, once ``|r|`` reaches ``r_max``;
    the offending point is not included.
    """
    r0 = np.asarray(r0, dtype=float)
    v0 = np.asarray(v0, dtype=float)
    if not np.linalg.norm(r0) < r_max:
        raise DomainError(f"initial point |r| = {np.linalg.norm(r0)} outside r_max = {r_max}")

    def rhs(t, y):
        with np.errstate(invalid="ignore", divide="ignore"):
            return np.concatenate([y[3:], geodesic_acceleration(y[:3], y[3:])])

    times, states = [], []
    hit = [False]

    def record(t, y):
        if not np.linalg.norm(y[:3]) < r_max:
            hit[0] = True
            return False
        times.append(t)
        states.append(y.copy())

    rk4(rhs, np.concatenate([r0, v0]), 0.0, duration, step, callback=record)
    states = np.array(states)
    return GeodesicPath(np.array(times), states[:, :3], states[:, 3:], hit[0])


# -- sustainability field --------------------------------------------------


@dataclass(frozen=True)
class SustainabilityField:
    """Unsustainability ``A`` over initial mixings ``(r1(0), r2(0))``.

    ``values[i, j]`` belongs to ``r2 = axis[i]``, ``r1 = axis[j]``; masked
    cells hold NaN.
    """

    delta: float
    eval_time: float
    grid_step: float
    r3_0: float
    source: str
    axis: np.ndarray
    values: np.ndarray
    mask: np.ndarray

    @property
    def shape(self):
        return self.values.shape

    def in_disc(self):
        """Cells whose initial point satisfies ``|r(0)| < 1``."""
        r1, r2 = np.meshgrid(self.axis, self.axis)
        return r1**2 + r2**2 + self.r3_0**2 < 1.0


def grid_axis(grid_step):
    if not grid_step > 0:
        raise DomainError("grid_step must be positive")
    m = int(np.floor(1.0 / grid_step + 1e-9))
    return np.arange(-m, m + 1) * grid_step


def _field_row(args):
    r2, axis, r3_0, delta, eval_time, source, r_max = args
    r0 = np.empty((axis.size, 3))
    r0[:, 0] = axis
    r0[:, 1] = r2
    r0[:, 2] = r3_0
    rt = trajectory(r0, delta, eval_time, source)
    vel, acc = trajectory_derivatives(r0, delta, eval_time, source)
    mask = ~((_norm(r0) < r_max) & (_norm(rt) < r_max))
    rt = np.where(mask[:, None], 0.0, rt)
    res = acc - geodesic_acceleration(rt, vel)
    a = np.where(mask, np.nan, _norm(res))
    return a, mask


def sustainability_grid(
    delta,
    eval_time,
    grid_step=0.01,
    r3_0=0.0,
    source=PAPER,
    workers=1,
    r_max=R_MAX,
) -> SustainabilityField:
    """Evaluate ``A`` on the square grid over ``[-1, 1]^2`` at one time.

    Cells whose initial or evaluated Bloch vector reaches ``r_max`` are
    masked.  Rows are independent; with ``workers > 1`` they are spread over
    a process pool and the result is identical to the serial one.
    """
    if source not in SOURCES:
        raise DomainError(f"unknown trajectory source {source!r}")
    axis = grid_axis(grid_step)
    jobs = [(r2, axis, r3_0, delta, eval_time, source, r_max) for r2 in axis]
    if workers > 1:
        with concurrent.futures.ProcessPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(_field_row, jobs, chunksize=max(1, len(jobs) // (4 * workers))))
    else:
        rows = [_field_row(job) for job in jobs]
    values = np.array([a for a, _ in rows])
    mask = np.array([m for _, m in rows])
    return SustainabilityField(
        float(delta), float(eval_time), float(grid_step), float(r3_0), source, axis, values, mask
    )


def shaded_fraction(field: SustainabilityField, threshold=A_THRESHOLD):
    """Fraction of the initial-mixing disc where ``A < threshold``.

    This is the collapse measure used for the Delta sweep; it is a proxy
    defined by this package, not a published quantity.
    """
    disc = field.in_disc()
    if not disc.any():
        return 0.0
    shaded = ~field.mask & (np.nan_to_num(field.values, nan=np.inf) < threshold)
    return float(np.count_nonzero(shaded & disc)) / float(np.count_nonzero(disc))


def collapse_curve(
    deltas=DEFAULT_DELTAS, threshold=A_THRESHOLD, grid_step=0.01, r3_0=0.0, source=PAPER, workers=1
):
    """Shaded fraction at half period ``t = pi / (2 Delta)`` for each Delta."""
    out = []
    for delta in deltas:
        field = sustainability_grid(
            delta, np.pi / (2 * delta), grid_step, r3_0, source, workers=workers
        )
        out.append((float(delta), shaded_fraction(field, threshold)))
    return out


def write_field_csv(field: SustainabilityField, fh):
    """Write ``r1,r2,A,masked`` rows (r2 outer, r1 inner) after ``#`` metadata lines."""
    fh.write(f"# delta={float(field.delta)!r}\n")
    fh.write(f"# eval_time={float(field.eval_time)!r}\n")
    fh.write(f"# grid_step={float(field.grid_step)!r}\n")
    fh.write(f"# r3_0={float(field.r3_0)!r}\n")
    fh.write(f"# source={field.source}\n")
    fh.write("r1,r2,A,masked\n")
    for i, r2 in enumerate(field.axis):
        for j, r1 in enumerate(field.axis):
            masked = bool(field.mask[i, j])
            a = "nan" if masked else repr(float(field.values[i, j]))
            fh.write(f"{float(r1)!r},{float(r2)!r},{a},{int(masked)}\n")


def field_to_csv(field: SustainabilityField) -> str:
    buf = io.StringIO()
    write_field_csv(field, buf)
    return buf.getvalue()


def read_field_csv(text: str) -> SustainabilityField:
    meta = {}
    rows = []
    for line in text.splitlines():
        if line.startswith("#"):
            key, _, val = line[1:].strip().partition("=")
            meta[key.strip()] = val.strip()
        elif line and not line.startswith("r1,"):
            rows.append(line.split(","))
    r1 = np.array([float(r[0]) for r in rows])
    r2 = np.array([float(r[1]) for r in rows])
    axis = np.unique(r1)
    n = axis.size
    if n * n != len(rows) or not np.array_equal(np.unique(r2), axis):
        raise DomainError("field CSV is not a square grid")
    values = np.array([float(r[2]) for r in rows]).reshape(n, n)
    mask = np.array([r[3].strip() == "1" for r in rows]).reshape(n, n)
    return SustainabilityField(
        float(meta["delta"]),
        float(meta["eval_time"]),
        float(meta["grid_step"]),
        float(meta["r3_0"]),
        meta["source"],
        axis,
        values,
        mask,
    )
