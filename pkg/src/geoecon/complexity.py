"""
Penalty-metric complexity geometry on su(2^n).

Pauli strings of weight <= 2 (gates with at most two entries) span the image
of the projector ``P``; the rest span the image of ``Q``.  The penalised inner
product is evaluated exactly as

    <A, B> = Tr(A P(B)) / 2^n + q Tr(A Q(B))

(with ``normalize_q_term=True`` the second term also gets the ``1/2^n``).
``dK/dt`` for the circuit variation is

    i (q - 1) F([Q H, P K] - [P H, Q K]) - F^2 (i [P H, Q H]),   F = P + Q / q.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._ode import rk4
from .errors import DimensionError, DomainError
from .pauli import AlgebraElement, coefficients, commutator, from_coefficients, num_qubits
from .pauli import parse_element, weight, weights

MAX_P_WEIGHT = 2
STRUCTURE_TOL = 1e-9


@dataclass(frozen=True)
class SuperoperatorSplit:
    p_part: AlgebraElement
    q_part: AlgebraElement


def _check_q(q):
    if not q > 0:
        raise DomainError(f"penalty factor must be positive, got {q}")


def split_pq(h: AlgebraElement) -> SuperoperatorSplit:
    p = {s: c for s, c in h.coords.items() if weight(s) <= MAX_P_WEIGHT}
    q = {s: c for s, c in h.coords.items() if weight(s) > MAX_P_WEIGHT}
    return SuperoperatorSplit(AlgebraElement(h.n, p), AlgebraElement(h.n, q))


def project_p(m):
    """``P`` acting on a dense matrix (keeps strings of weight <= 2)."""
    m = np.asarray(m, dtype=complex)
    c = coefficients(m)
    c[weights(num_qubits(m.shape[0])) > MAX_P_WEIGHT] = 0.0
    return from_coefficients(c)


def project_q(m):
    """``Q`` acting on a dense matrix (keeps strings of weight >= 3)."""
    m = np.asarray(m, dtype=complex)
    c = coefficients(m)
    c[weights(num_qubits(m.shape[0])) <= MAX_P_WEIGHT] = 0.0
    return from_coefficients(c)


def apply_f(m, q, power=1):
    """``F^power`` with ``F = P + Q / q``."""
    _check_q(q)
    m = np.asarray(m, dtype=complex)
    c = coefficients(m)
    c[weights(num_qubits(m.shape[0])) > MAX_P_WEIGHT] /= q**power
    return from_coefficients(c)


def inner_product(a: AlgebraElement, b: AlgebraElement, q, normalize_q_term=False):
    """Penalised scalar product, computed from Pauli coordinates.

    Each string squares to the identity, so ``Tr(s s) = 2^n`` and the
    trace formula reduces to weighted coordinate sums.
    """
    _check_q(q)
    if a.n != b.n:
        raise DimensionError("inner product of elements with different qubit counts")
    scale_q = q if normalize_q_term else q * 2**a.n
    total = 0.0
    for s, ca in a.coords.items():
        cb = b.coords.get(s)
        if cb is not None:
            total += ca * cb * (1.0 if weight(s) <= MAX_P_WEIGHT else scale_q)
    return total


def inner_product_trace(a, b, q, normalize_q_term=False):
    """The same scalar product evaluated literally on dense matrices."""
    _check_q(q)
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    if a.shape != b.shape:
        raise DimensionError(f"shapes {a.shape} and {b.shape} differ")
    dim = a.shape[0]
    q_scale = q / dim if normalize_q_term else q
    val = np.trace(a @ project_p(b)) / dim + q_scale * np.trace(a @ project_q(b))
    return float(val.real)


def cost(h: AlgebraElement, q, normalize_q_term=False):
    return inner_product(h, h, q, normalize_q_term)


def literal_geodesic(x0: AlgebraElement, v0: AlgebraElement, q, duration, step):
    """Geodesic of the constant diagonal penalty metric: a straight line in coordinates.

    The metric does not depend on the coordinates, so every Christoffel
    symbol vanishes and ``x(t) = x0 + v0 t``.

    Returns
    -------
    times : ndarray
    path : list of AlgebraElement
    """
    _check_q(q)
    if x0.n != v0.n:
        raise DimensionError("x0 and v0 have different qubit counts")
    n_steps = max(1, int(round(duration / step)))
    times = np.linspace(0.0, duration, n_steps + 1)
    return times, [x0 + float(t) * v0 for t in times]


@dataclass(frozen=True)
class VariationState:
    K: np.ndarray
    t: float = 0.0

    def __post_init__(self):
        k = np.array(self.K, dtype=complex)
        if k.ndim != 2 or k.shape[0] != k.shape[1]:
            raise DimensionError("K must be square")
        num_qubits(k.shape[0])
        if np.max(np.abs(k - k.conj().T)) > STRUCTURE_TOL:
            raise DomainError("K is not Hermitian")
        if abs(np.trace(k)) > STRUCTURE_TOL:
            raise DomainError("K is not traceless")
        k.setflags(write=False)
        object.__setattr__(self, "K", k)

    @classmethod
    def zero(cls, n, t=0.0):
        return cls(np.zeros((2**n, 2**n), dtype=complex), t)


def _split_matrices(h):
    if isinstance(h, AlgebraElement):
        parts = split_pq(h)
        return parts.p_part.matrix(), parts.q_part.matrix()
    h = np.asarray(h, dtype=complex)
    return project_p(h), project_q(h)


class _RhsTerms:
    """Pieces of the right-hand side that depend only on ``H`` and ``q``."""

    def __init__(self, h, q):
        _check_q(q)
        self.ph, self.qh = _split_matrices(h)
        self.q = q
        w = weights(num_qubits(self.ph.shape[0]))
        self.p_mask = w <= MAX_P_WEIGHT
        self.f = np.where(self.p_mask, 1.0, 1.0 / q)
        # coefficients of F^2 (i [P H, Q H])
        self.source = self.f**2 * coefficients(1j * commutator(self.ph, self.qh))

    def __call__(self, kmat):
        ck = coefficients(kmat)
        pk = from_coefficients(np.where(self.p_mask, ck, 0.0))
        qk = from_coefficients(np.where(self.p_mask, 0.0, ck))
        inner = commutator(self.qh, pk) - commutator(self.ph, qk)
        c = 1j * (self.q - 1) * self.f * coefficients(inner) - self.source
        return from_coefficients(c)


def brandt_rhs(h, k, q):
    """Right-hand side of the variation equation ``dK/dt``.

    ``h`` is an :class:`AlgebraElement` (or dense Hermitian matrix) and ``k``
    a :class:`VariationState` or dense matrix of the same size.
    """
    terms = _RhsTerms(h, q)
    kmat = k.K if isinstance(k, VariationState) else np.asarray(k, dtype=complex)
    if terms.ph.shape != kmat.shape:
        raise DimensionError(f"H is {terms.ph.shape}, K is {kmat.shape}")
    return terms(kmat)


def integrate_brandt(h_path, k0: VariationState, q, duration, step=1e-2, record_every=1):
    """RK4 integration of ``dK/dt = brandt_rhs(H(t), K, q)``.

    Parameters
    ----------
    h_path : callable or AlgebraElement
        ``h_path(t)`` returns the Hamiltonian at time ``t``; a constant
        element is accepted as is.

    Returns
    -------
    times : ndarray
    ks : ndarray, shape (len(times), 2^n, 2^n)
    """
    _check_q(q)
    if isinstance(h_path, AlgebraElement):
        constant = h_path

        def h_path(t):
            return constant

    cache = {}

    def rhs(t, kmat):
        h = h_path(t)
        key = id(h)
        if key not in cache:
            cache.clear()
            cache[key] = (h, _RhsTerms(h, q))
        return cache[key][1](kmat)

    times, ks = [], []
    counter = [0]

    def record(t, y):
        if counter[0] % record_every == 0:
            times.append(t)
            ks.append(y.copy())
        counter[0] += 1

    t_end, k_end = rk4(rhs, np.asarray(k0.K), k0.t, k0.t + duration, step, callback=record)
    if times[-1] != t_end:
        times.append(t_end)
        ks.append(k_end)
    return np.array(times), np.array(ks)


class PiecewiseHamiltonian:
    """Piecewise-constant ``H(t)``: block ``i`` holds from ``times[i]`` on."""

    def __init__(self, times, elements):
        if len(times) != len(elements) or not elements:
            raise DomainError("need one element per breakpoint")
        if np.any(np.diff(times) <= 0):
            raise DomainError("breakpoints must increase")
        if len({e.n for e in elements}) != 1:
            raise DimensionError("all blocks must have the same qubit count")
        self.times = np.asarray(times, dtype=float)
        self.elements = list(elements)
        self.n = elements[0].n

    def __call__(self, t):
        i = int(np.searchsorted(self.times, t, side="right")) - 1
        return self.elements[max(i, 0)]


def parse_hamiltonian_path(text: str) -> PiecewiseHamiltonian:
    """Parse blocks of ``<word> <coef>`` lines, each opened by a ``t=<time>`` header."""
    times, blocks, current = [], [], None
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.lower().startswith("t="):
            try:
                times.append(float(line[2:]))
            except ValueError:
                raise DomainError(f"bad block header {raw!r}") from None
            current = []
            blocks.append(current)
        elif current is None:
            raise DomainError("H-path must start with a 't=<time>' header")
        else:
            current.append(line)
    elements = [parse_element("\n".join(b)) for b in blocks]
    return PiecewiseHamiltonian(times, elements)
