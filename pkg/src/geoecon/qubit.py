"""
Single-qubit dynamics for one agent with a two-level wealth spectrum.

The Hamiltonian is ``H(t) = h0 s0 + h1 s1 + h2 s2 + h3 s3`` with real
coefficients (hbar = 1).  The evolution operator is

    U(t, t0) = exp(-i int h0) [u s0 + i (v1 s1 + v2 s2 + v3 s3)]

where the real 4-vector ``q = (u, v1, v2, v3)`` obeys a linear ODE with an
antisymmetric generator, starting from ``q(t0) = (1, 0, 0, 0)``.

Two Bloch-vector trajectories are offered for the fixed-spectrum case
``h = (E_m, 0, 0, Delta)``: the exact conjugation ``rho -> U rho U^+``
(``source="exact"``) and the closed form in which only ``r^1`` is modulated
(``source="paper"``).  They differ; the latter does not preserve ``|r|``.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._ode import rk4
from .errors import DomainError
from .pauli import SIGMA, decompose

PAPER = "paper"
EXACT = "exact"
SOURCES = (PAPER, EXACT)


@dataclass(frozen=True)
class WealthSpectrum:
    """Eigenvalues of the wealth observable for the alive/dead states."""

    e_alive: float
    e_dead: float

    def __post_init__(self):
        if not self.e_alive > self.e_dead:
            raise DomainError("need E_a > E_d")

    @property
    def mean(self) -> float:
        return 0.5 * (self.e_alive + self.e_dead)

    @property
    def half_range(self) -> float:
        return 0.5 * (self.e_alive - self.e_dead)

    def coeffs(self, t=None):
        """Constant Hamiltonian coefficients ``(E_m, 0, 0, Delta)``."""
        return np.array([self.mean, 0.0, 0.0, self.half_range])


def generator(h) -> np.ndarray:
    """4x4 antisymmetric generator ``M`` of ``dq/dt = M q`` from ``(h0, h1, h2, h3)``."""
    _, h1, h2, h3 = h
    return np.array(
        [
            [0.0, h1, h2, h3],
            [-h1, 0.0, -h3, h2],
            [-h2, h3, 0.0, -h1],
            [-h3, -h2, h1, 0.0],
        ]
    )


def _checked(h, t):
    h = np.asarray(h(t), dtype=float)
    if h.shape != (4,) or not np.all(np.isfinite(h)):
        raise DomainError(f"Hamiltonian coefficients at t={t} are not four finite reals: {h}")
    return h


def integrate_q(h, t0, t, step=1e-3):
    """RK4 solution ``q(t, t0)`` of the evolution-quaternion ODE.

    Parameters
    ----------
    h : callable
        ``h(t)`` returns the four real coefficients ``(h0, h1, h2, h3)``.
    t0, t : float
        Start and end times, ``t >= t0``.
    step : float
        Fixed RK4 step.

    Returns
    -------
    q : ndarray, shape (4,)
    """
    if t < t0:
        raise DomainError("integrate_q needs t >= t0")
    _, q = rk4(lambda s, y: generator(_checked(h, s)) @ y, np.array([1.0, 0, 0, 0]), t0, t, step)
    return q


def phase_integral(h, t0, t, step=1e-3):
    """``int_{t0}^{t} h0`` by composite Simpson on the ``step`` grid."""
    if t == t0:
        return 0.0
    n = max(2, int(np.ceil((t - t0) / step)))
    n += n % 2
    ts = np.linspace(t0, t, n + 1)
    f = np.array([_checked(h, s)[0] for s in ts])
    dt = (t - t0) / n
    return dt / 3 * (f[0] + f[-1] + 4 * f[1:-1:2].sum() + 2 * f[2:-1:2].sum())


def closed_form_q(spectrum: WealthSpectrum, t0, t):
    """Exact ``q`` for the fixed spectrum: ``(cos x, 0, 0, -sin x)``, ``x = (t - t0) Delta``."""
    x = (t - t0) * spectrum.half_range
    return np.array([np.cos(x), 0.0, 0.0, -np.sin(x)])


def build_unitary(q, phase_integral=0.0):
    q = np.asarray(q, dtype=float)
    if abs(np.linalg.norm(q) - 1.0) > 1e-6:
        raise DomainError(f"evolution quaternion not normalized: |q| = {np.linalg.norm(q)}")
    u, v1, v2, v3 = q
    core = u * SIGMA[0] + 1j * (v1 * SIGMA[1] + v2 * SIGMA[2] + v3 * SIGMA[3])
    return np.exp(-1j * phase_integral) * core


def evolution_operator(h, t0, t, step=1e-3):
    """``U(t, t0)`` for a general coefficient function, numerically."""
    return build_unitary(integrate_q(h, t0, t, step), phase_integral(h, t0, t, step))


def fixed_spectrum_unitary(spectrum: WealthSpectrum, t, t0=0.0):
    return build_unitary(closed_form_q(spectrum, t0, t), (t - t0) * spectrum.mean)


def density_matrix(r):
    r = np.asarray(r, dtype=float)
    return 0.5 * (SIGMA[0] + np.einsum("j,jab->ab", r, SIGMA[1:]))


def bloch_vector(rho):
    elem, _ = decompose(rho, 1)
    v = elem.vector()
    return 2.0 * v[1:]


def evolve_density(r0, U):
    """Bloch vector of ``U rho(r0) U^+``."""
    U = np.asarray(U, dtype=complex)
    if U.shape != (2, 2) or np.max(np.abs(U.conj().T @ U - np.eye(2))) > 1e-8:
        raise DomainError("evolve_density needs a 2x2 unitary")
    r0 = np.asarray(r0, dtype=float)
    if np.linalg.norm(r0) > 1.0 + 1e-12:
        raise DomainError("initial Bloch vector lies outside the unit ball")
    return bloch_vector(U @ density_matrix(r0) @ U.conj().T)


def paper_trajectory(r0, delta, t):
    """Closed-form trajectory that modulates ``r^1`` only.

    ``r0`` may carry leading batch axes (shape ``(..., 3)``); ``t`` broadcasts.
    """
    r0 = np.asarray(r0, dtype=float)
    c, s = np.cos(2 * t * delta), np.sin(2 * t * delta)
    out = np.array(r0, copy=True)
    out[..., 0] = r0[..., 0] * c + r0[..., 1] * s
    return out


def exact_trajectory(r0, delta, t):
    """Conjugation by the fixed-spectrum unitary: rotation of ``(r^1, r^2)`` by ``2 t Delta``."""
    r0 = np.asarray(r0, dtype=float)
    c, s = np.cos(2 * t * delta), np.sin(2 * t * delta)
    out = np.array(r0, copy=True)
    out[..., 0] = r0[..., 0] * c - r0[..., 1] * s
    out[..., 1] = r0[..., 0] * s + r0[..., 1] * c
    return out


def trajectory(r0, delta, t, source=PAPER):
    if source == PAPER:
        return paper_trajectory(r0, delta, t)
    if source == EXACT:
        return exact_trajectory(r0, delta, t)
    raise DomainError(f"unknown trajectory source {source!r}")


def trajectory_derivatives(r0, delta, t, source=PAPER):
    """Analytic velocity and acceleration of a fixed-spectrum trajectory.

    Returns
    -------
    velocity, acceleration : ndarray, shape like ``r0``
    """
    r0 = np.asarray(r0, dtype=float)
    w = 2.0 * delta
    vel = np.zeros_like(r0)
    acc = np.zeros_like(r0)
    r = trajectory(r0, delta, t, source)
    if source == PAPER:
        c, s = np.cos(w * t), np.sin(w * t)
        vel[..., 0] = w * (-r0[..., 0] * s + r0[..., 1] * c)
        acc[..., 0] = -(w**2) * r[..., 0]
    else:
        # uniform rotation about the third axis
        vel[..., 0] = -w * r[..., 1]
        vel[..., 1] = w * r[..., 0]
        acc[..., 0] = -(w**2) * r[..., 0]
        acc[..., 1] = -(w**2) * r[..., 1]
    return vel, acc
