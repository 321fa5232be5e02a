"""
Pauli matrices, Pauli strings and real coordinates on su(2^n).

An n-qubit Pauli string is a word over {I, X, Y, Z}, stored as letters in
{0, 1, 2, 3} with 0 standing for the identity.  The first letter acts on the
most significant tensor factor, so ``"XZ"`` is ``kron(X, Z)``.

Hermitian traceless operators are stored sparsely as :class:`AlgebraElement`
(Pauli-string -> real coefficient); dense matrices are built on demand.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import lru_cache
from types import MappingProxyType
from typing import Iterable, Mapping

import numpy as np

from .errors import DimensionError, DomainError

HERMITIAN_TOL = 1e-10

SIGMA = np.array(
    [
        [[1, 0], [0, 1]],
        [[0, 1], [1, 0]],
        [[0, -1j], [1j, 0]],
        [[1, 0], [0, -1]],
    ],
    dtype=complex,
)
SIGMA.setflags(write=False)

_LETTERS = "IXYZ"


@dataclass(frozen=True, order=True)
class PauliString:
    """A tensor product of single-qubit Pauli matrices.

    Parameters
    ----------
    letters : tuple of int
        One entry in {0, 1, 2, 3} per qubit.
    """

    letters: tuple

    def __post_init__(self):
        letters = tuple(int(c) for c in self.letters)
        if not letters:
            raise DomainError("a Pauli string needs at least one letter")
        if any(c not in (0, 1, 2, 3) for c in letters):
            raise DomainError(f"Pauli letters must be in 0..3, got {letters}")
        object.__setattr__(self, "letters", letters)

    @classmethod
    def parse(cls, text: str) -> "PauliString":
        """Parse ``"XXI"`` (case-insensitive) or the digit form ``"110"``."""
        text = text.strip()
        out = []
        for ch in text:
            if ch.upper() in _LETTERS:
                out.append(_LETTERS.index(ch.upper()))
            elif ch in "0123":
                out.append(int(ch))
            else:
                raise DomainError(f"invalid Pauli letter {ch!r} in {text!r}")
        return cls(tuple(out))

    @property
    def n(self) -> int:
        return len(self.letters)

    @property
    def index(self) -> int:
        """Position in the base-4 enumeration of all n-letter strings."""
        idx = 0
        for c in self.letters:
            idx = 4 * idx + c
        return idx

    def __str__(self):
        return "".join(_LETTERS[c] for c in self.letters)


def as_string(s) -> PauliString:
    if isinstance(s, PauliString):
        return s
    if isinstance(s, str):
        return PauliString.parse(s)
    return PauliString(tuple(s))


def string_to_matrix(s) -> np.ndarray:
    """Dense 2^n x 2^n matrix of a Pauli string."""
    s = as_string(s)
    m = np.ones((1, 1), dtype=complex)
    for c in s.letters:
        m = np.kron(m, SIGMA[c])
    return m


def weight(s) -> int:
    """Number of non-identity letters."""
    return sum(1 for c in as_string(s).letters if c != 0)


def commutator(a, b) -> np.ndarray:
    a = np.asarray(a)
    b = np.asarray(b)
    if a.shape != b.shape or a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise DimensionError(f"commutator of shapes {a.shape} and {b.shape}")
    return a @ b - b @ a


def all_strings(n: int):
    """All 4^n strings in index order (identity first)."""
    return [PauliString(p) for p in itertools.product(range(4), repeat=n)]


@lru_cache(maxsize=None)
def _basis(n: int) -> np.ndarray:
    """Stack of the 4^n Pauli-string matrices, shape (4^n, 2^n, 2^n)."""
    b = np.ones((1, 1, 1), dtype=complex)
    for _ in range(n):
        b = np.einsum("aij,ckl->acikjl", b, SIGMA).reshape(
            b.shape[0] * 4, b.shape[1] * 2, b.shape[2] * 2
        )
    b.setflags(write=False)
    return b


@lru_cache(maxsize=None)
def _basis_transposed_flat(n: int) -> np.ndarray:
    b = np.ascontiguousarray(_basis(n).transpose(0, 2, 1)).reshape(4**n, -1)
    b.setflags(write=False)
    return b


@lru_cache(maxsize=None)
def weights(n: int) -> np.ndarray:
    """Weights of all 4^n strings in index order."""
    w = np.array([weight(p) for p in itertools.product(range(4), repeat=n)])
    w.setflags(write=False)
    return w


def num_qubits(dim: int) -> int:
    n = int(round(np.log2(dim))) if dim > 0 else -1
    if n < 0 or 2**n != dim:
        raise DimensionError(f"dimension {dim} is not a power of two")
    return n


def coefficients(m) -> np.ndarray:
    """Complex Pauli coefficients ``Tr(m s) / 2^n`` of any square matrix.

    Returns a length-4^n vector in index order.  No Hermiticity check.
    """
    m = np.asarray(m)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise DimensionError(f"expected a square matrix, got shape {m.shape}")
    n = num_qubits(m.shape[0])
    # Tr(m s) = sum_ij m_ij s_ji
    return (_basis_transposed_flat(n) @ m.ravel()) / 2**n


def from_coefficients(c) -> np.ndarray:
    """Inverse of :func:`coefficients`."""
    c = np.asarray(c)
    n = num_qubits(int(round(np.sqrt(c.shape[0]))))
    dim = 2**n
    return (c @ _basis(n).reshape(4**n, dim * dim)).reshape(dim, dim)


@dataclass(frozen=True)
class AlgebraElement:
    """Real linear combination of non-identity n-qubit Pauli strings.

    Zero coefficients are dropped on construction.
    """

    n: int
    coords: Mapping = field(default_factory=dict)

    def __post_init__(self):
        if self.n < 1:
            raise DomainError("qubit count must be >= 1")
        clean = {}
        for key, val in dict(self.coords).items():
            s = as_string(key)
            if s.n != self.n:
                raise DimensionError(f"string {s} has length {s.n}, expected {self.n}")
            if weight(s) == 0:
                raise DomainError("the identity string is not a basis element of su(2^n)")
            val = float(val)
            if val != 0.0:
                clean[s] = clean.get(s, 0.0) + val
        object.__setattr__(self, "coords", MappingProxyType(clean))

    @classmethod
    def from_terms(cls, terms: Mapping | Iterable, n: int | None = None) -> "AlgebraElement":
        """Build from ``{"XXI": 1.0, ...}`` or an iterable of ``(word, coef)``."""
        items = list(terms.items() if isinstance(terms, Mapping) else terms)
        strings = [(as_string(k), v) for k, v in items]
        if n is None:
            if not strings:
                raise DomainError("cannot infer qubit count from an empty element")
            n = strings[0][0].n
        return cls(n, dict(strings))

    @classmethod
    def zero(cls, n: int) -> "AlgebraElement":
        return cls(n, {})

    @classmethod
    def from_vector(cls, vec, n: int) -> "AlgebraElement":
        """From a real length-4^n coefficient vector (identity entry ignored)."""
        vec = np.asarray(vec, dtype=float)
        strings = all_strings(n)
        return cls(n, {s: vec[i] for i, s in enumerate(strings) if i and vec[i] != 0})

    def vector(self) -> np.ndarray:
        """Dense length-4^n real coefficient vector in index order."""
        v = np.zeros(4**self.n)
        for s, c in self.coords.items():
            v[s.index] = c
        return v

    def matrix(self) -> np.ndarray:
        return from_coefficients(self.vector().astype(complex))

    def __add__(self, other: "AlgebraElement") -> "AlgebraElement":
        if not isinstance(other, AlgebraElement):
            return NotImplemented
        if other.n != self.n:
            raise DimensionError("adding elements of different qubit counts")
        out = dict(self.coords)
        for s, c in other.coords.items():
            out[s] = out.get(s, 0.0) + c
        return AlgebraElement(self.n, out)

    def __sub__(self, other: "AlgebraElement") -> "AlgebraElement":
        return self + (-1.0) * other

    def __mul__(self, scalar) -> "AlgebraElement":
        return AlgebraElement(self.n, {s: scalar * c for s, c in self.coords.items()})

    __rmul__ = __mul__

    def __len__(self):
        return len(self.coords)

    def __str__(self):
        return "\n".join(f"{s} {float(c)!r}" for s, c in sorted(self.coords.items()))


def decompose(m, n: int | None = None, tol: float = HERMITIAN_TOL):
    """Split a Hermitian matrix into its identity part and an AlgebraElement.

    Parameters
    ----------
    m : (2^n, 2^n) array_like
        Hermitian within ``tol``.
    n : int, optional
        Expected qubit count; inferred from the shape when omitted.

    Returns
    -------
    element : AlgebraElement
    identity_coeff : float
        Coefficient of the all-identity string, ``Tr(m) / 2^n``.
    """
    m = np.asarray(m, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise DimensionError(f"expected a square matrix, got shape {m.shape}")
    n_found = num_qubits(m.shape[0])
    if n is not None and n != n_found:
        raise DimensionError(f"matrix of size {m.shape[0]} is not {n} qubits")
    if np.max(np.abs(m - m.conj().T), initial=0.0) > tol:
        raise DomainError("matrix is not Hermitian")
    c = coefficients(m).real
    return AlgebraElement.from_vector(c, n_found), float(c[0])


def parse_element(text: str) -> AlgebraElement:
    """Parse ``<pauli-word> <coefficient>`` lines (``#`` starts a comment)."""
    terms = []
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) != 2:
            raise DomainError(f"expected '<word> <coefficient>', got {raw!r}")
        terms.append((parts[0], float(parts[1])))
    return AlgebraElement.from_terms(terms)


def format_element(h: AlgebraElement) -> str:
    return "".join(f"{s} {float(c)!r}\n" for s, c in sorted(h.coords.items()))
