"""Direct-inversion tomography of a qubit from three projective measurements."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DomainError


@dataclass(frozen=True)
class CountTriplet:
    """Outcome counts ``(N_a, N_d)`` along Bloch axes 1, 2, 3."""

    alive: tuple
    dead: tuple

    def __post_init__(self):
        a = tuple(int(v) for v in self.alive)
        d = tuple(int(v) for v in self.dead)
        if len(a) != 3 or len(d) != 3:
            raise DomainError("need counts for exactly three axes")
        if min(a + d) < 0:
            raise DomainError("counts must be non-negative")
        if any(x + y < 1 for x, y in zip(a, d)):
            raise DomainError("every axis needs at least one count")
        object.__setattr__(self, "alive", a)
        object.__setattr__(self, "dead", d)

    @property
    def totals(self):
        return tuple(x + y for x, y in zip(self.alive, self.dead))


def direct_inversion(counts: CountTriplet):
    """Estimate ``r^j = (N_a - N_d) / N`` per axis.

    Returns
    -------
    r : ndarray, shape (3,)
    valid : bool
        False when the estimate falls outside the Bloch ball; it is
        reported as is, never projected back.
    """
    a = np.array(counts.alive, dtype=float)
    d = np.array(counts.dead, dtype=float)
    r = (a - d) / (a + d)
    return r, bool(np.linalg.norm(r) <= 1.0)


def from_probabilities(p_alive):
    """Inversion from exact outcome probabilities ``(1 + r^j) / 2``."""
    p = np.asarray(p_alive, dtype=float)
    if p.shape != (3,) or np.any((p < 0) | (p > 1)):
        raise DomainError("need three probabilities in [0, 1]")
    r = p - (1.0 - p)
    return r, bool(np.linalg.norm(r) <= 1.0)


def sample_counts(r, shots, rng) -> CountTriplet:
    """Binomial counts for ``shots`` measurements per axis of state ``r``."""
    r = np.asarray(r, dtype=float)
    if np.linalg.norm(r) > 1.0 + 1e-12:
        raise DomainError("state outside the Bloch ball")
    p = np.clip((1.0 + r) / 2.0, 0.0, 1.0)
    alive = rng.binomial(shots, p)
    return CountTriplet(tuple(alive), tuple(shots - alive))


def parse_counts(text: str) -> CountTriplet:
    """Parse three ``j N_a N_d`` lines, j = 1..3 in any order."""
    rows = {}
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) != 3:
            raise DomainError(f"expected 'j N_a N_d', got {raw!r}")
        try:
            j, na, nd = (int(p) for p in parts)
        except ValueError:
            raise DomainError(f"non-integer count line {raw!r}") from None
        if j not in (1, 2, 3) or j in rows:
            raise DomainError(f"bad or repeated axis index {j}")
        rows[j] = (na, nd)
    if set(rows) != {1, 2, 3}:
        raise DomainError("counts for axes 1, 2 and 3 are required")
    return CountTriplet(tuple(rows[j][0] for j in (1, 2, 3)), tuple(rows[j][1] for j in (1, 2, 3)))
