"""
Primitive qudit gates and compilation of gate lists to a global unitary.

Three primitives are supported:

* ``Determination`` -- arbitrary single-qudit unitary on one agent.
* ``Phase`` -- multiplies the target's highest basis state ``|d-1>`` by ``exp(i phi)``.
* ``Controlled`` -- applies a single-qudit unitary to the target when the
  control qudit is in ``|d-1>``; identity otherwise.

Agent 0 is the most significant tensor factor.  Gates act in list order, so
the compiled matrix is ``U = G_k ... G_2 G_1``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import DimensionError, DomainError

UNITARY_TOL = 1e-10
MAX_DIM = 4096

DETERMINATION = "Determination"
PHASE = "Phase"
CONTROLLED = "Controlled"


def _is_unitary(u, tol):
    u = np.asarray(u)
    return np.max(np.abs(u.conj().T @ u - np.eye(u.shape[0]))) <= tol


@dataclass(frozen=True)
class Gate:
    kind: str
    target: int
    payload: object
    control: Optional[int] = None

    def __post_init__(self):
        if self.kind not in (DETERMINATION, PHASE, CONTROLLED):
            raise DomainError(f"unknown gate kind {self.kind!r}")
        if self.target < 0:
            raise DomainError("negative target index")
        if self.kind == CONTROLLED:
            if self.control is None or self.control < 0:
                raise DomainError("controlled gate needs a non-negative control index")
            if self.control == self.target:
                raise DomainError("control and target coincide")
        elif self.control is not None:
            raise DomainError(f"{self.kind} gate takes no control")
        if self.kind == PHASE:
            object.__setattr__(self, "payload", float(self.payload))
        else:
            u = np.array(self.payload, dtype=complex)
            if u.ndim != 2 or u.shape[0] != u.shape[1]:
                raise DimensionError("gate payload must be a square matrix")
            if not _is_unitary(u, UNITARY_TOL):
                raise DomainError("gate payload is not unitary")
            u.setflags(write=False)
            object.__setattr__(self, "payload", u)


def determination(target, u):
    return Gate(DETERMINATION, target, u)


def phase(target, angle):
    return Gate(PHASE, target, angle)


def controlled(control, target, u):
    return Gate(CONTROLLED, target, u, control=control)


@dataclass(frozen=True)
class Circuit:
    n: int
    d: int
    gates: tuple = field(default_factory=tuple)

    def __post_init__(self):
        if self.n < 1:
            raise DomainError("need at least one agent")
        if self.d < 2:
            raise DomainError("wealth spectrum dimension must be >= 2")
        gates = tuple(self.gates)
        for g in gates:
            idx = [g.target] + ([g.control] if g.control is not None else [])
            if any(i >= self.n for i in idx):
                raise DomainError(f"gate index out of range for n={self.n}: {g}")
            if g.kind != PHASE and g.payload.shape != (self.d, self.d):
                raise DimensionError(f"payload shape {g.payload.shape} does not match d={self.d}")
        object.__setattr__(self, "gates", gates)

    def __add__(self, other: "Circuit") -> "Circuit":
        if (self.n, self.d) != (other.n, other.d):
            raise DimensionError("concatenating circuits of different shape")
        return Circuit(self.n, self.d, self.gates + other.gates)


def _embed(op, target, n, d):
    """Embed a single-qudit operator acting on ``target`` into d^n dimensions."""
    left = np.eye(d**target)
    right = np.eye(d ** (n - target - 1))
    return np.kron(np.kron(left, op), right)


def gate_matrix(g: Gate, n: int, d: int) -> np.ndarray:
    if g.kind == DETERMINATION:
        return _embed(g.payload, g.target, n, d)
    if g.kind == PHASE:
        diag = np.ones(d, dtype=complex)
        diag[-1] = np.exp(1j * g.payload)
        return _embed(np.diag(diag), g.target, n, d)
    # controlled: |d-1><d-1|_c (x) U_t + (I - |d-1><d-1|)_c (x) I
    proj = np.zeros((d, d))
    proj[-1, -1] = 1.0
    on = _embed(proj, g.control, n, d) @ _embed(g.payload, g.target, n, d)
    off = _embed(np.eye(d) - proj, g.control, n, d)
    return on + off


def compile_circuit(c: Circuit) -> np.ndarray:
    """Global ``d^n x d^n`` unitary of a circuit."""
    dim = c.d**c.n
    if dim > MAX_DIM:
        raise DomainError(f"system dimension {dim} exceeds {MAX_DIM}")
    u = np.eye(dim, dtype=complex)
    for g in c.gates:
        u = gate_matrix(g, c.n, c.d) @ u
    return u


def _parse_matrix(tokens, d, lineno):
    if len(tokens) != d * d:
        raise DomainError(f"line {lineno}: expected {d * d} complex entries, got {len(tokens)}")
    vals = []
    for tok in tokens:
        try:
            re, im = tok.split(",")
            vals.append(complex(float(re), float(im)))
        except ValueError:
            raise DomainError(f"line {lineno}: bad complex entry {tok!r}") from None
    return np.array(vals).reshape(d, d)


def parse_circuit(text: str) -> Circuit:
    """Parse the one-gate-per-line text format.

    Header ``n=<n> d=<d>``, then lines ``DET <t> <entries>``,
    ``PHASE <t> <angle>`` or ``CTRL <c> <t> <entries>`` where each complex
    entry is written ``re,im``.  Blank lines and ``#`` comments are ignored.
    """
    lines = [
        (i + 1, raw.split("#", 1)[0].split())
        for i, raw in enumerate(text.splitlines())
    ]
    lines = [(i, toks) for i, toks in lines if toks]
    if not lines:
        raise DomainError("empty circuit description")
    header = dict(tok.split("=", 1) for tok in lines[0][1] if "=" in tok)
    try:
        n, d = int(header["n"]), int(header["d"])
    except (KeyError, ValueError):
        raise DomainError("first line must be 'n=<n> d=<d>'") from None
    gates = []
    for lineno, toks in lines[1:]:
        op = toks[0].upper()
        try:
            if op == "DET":
                gates.append(determination(int(toks[1]), _parse_matrix(toks[2:], d, lineno)))
            elif op == "PHASE":
                if len(toks) != 3:
                    raise DomainError(f"line {lineno}: PHASE takes a target and an angle")
                gates.append(phase(int(toks[1]), float(toks[2])))
            elif op == "CTRL":
                gates.append(controlled(int(toks[1]), int(toks[2]), _parse_matrix(toks[3:], d, lineno)))
            else:
                raise DomainError(f"line {lineno}: unknown gate {toks[0]!r}")
        except (IndexError, ValueError) as exc:
            if isinstance(exc, DomainError):
                raise
            raise DomainError(f"line {lineno}: {exc}") from None
    return Circuit(n, d, tuple(gates))


def format_circuit(c: Circuit) -> str:
    def entries(u):
        return " ".join(f"{float(z.real)!r},{float(z.imag)!r}" for z in np.asarray(u).ravel())

    out = [f"n={c.n} d={c.d}"]
    for g in c.gates:
        if g.kind == DETERMINATION:
            out.append(f"DET {g.target} {entries(g.payload)}")
        elif g.kind == PHASE:
            out.append(f"PHASE {g.target} {float(g.payload)!r}")
        else:
            out.append(f"CTRL {g.control} {g.target} {entries(g.payload)}")
    return "\n".join(out) + "\n"
