"""Dense linear algebra for few-qubit states.

Conventions used throughout the package:

* Qubit 0 is the leftmost symbol of a ket label and the most significant bit
  of a basis index.  ``pauli_operator("ZII")`` therefore acts on qubit 0 and
  equals ``diag(1, 1, 1, 1, -1, -1, -1, -1)``.
* States and operators are dense complex numpy arrays.  Nothing here is meant
  to scale past a handful of qubits.
* Tolerances: 1e-9 for algebraic identities, 1e-6 for physicality checks.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import reduce
from typing import Iterable

import numpy as np

from .errors import (
    DimensionMismatch,
    GrosslyNonHermitian,
    NotHermitian,
    NotSquare,
    StronglyNonPositive,
)

PAULI: dict[str, np.ndarray] = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}

ALGEBRAIC_TOL = 1e-9
PHYSICALITY_TOL = 1e-6


def tensor(*operators: np.ndarray) -> np.ndarray:
    """Kronecker product of the given operators, left factor most significant."""
    if not operators:
        raise DimensionMismatch("tensor() needs at least one operator")
    return reduce(np.kron, [np.asarray(op, dtype=complex) for op in operators])


def pauli_operator(label: str) -> np.ndarray:
    """Return the 2^n x 2^n operator for a label over the alphabet I, X, Y, Z.

    The first character acts on qubit 0 (most significant position).
    """
    if not label or any(ch not in PAULI for ch in label):
        raise ValueError(f"not a Pauli label: {label!r}")
    return tensor(*(PAULI[ch] for ch in label))


def ket(bits: str) -> np.ndarray:
    """Computational basis state for a bit string, e.g. ket("010")."""
    if not bits or any(b not in "01" for b in bits):
        raise ValueError(f"not a bit string: {bits!r}")
    vec = np.zeros(2 ** len(bits), dtype=complex)
    vec[int(bits, 2)] = 1.0
    return vec


def projector(psi: np.ndarray) -> np.ndarray:
    """|psi><psi| for a (normalized) state vector."""
    v = np.asarray(psi, dtype=complex).reshape(-1)
    return np.outer(v, v.conj())


def _as_square(a: np.ndarray, what: str) -> np.ndarray:
    m = np.asarray(a, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise NotSquare(f"{what} must be a square matrix, got shape {m.shape}")
    return m


def _require_hermitian(m: np.ndarray, tol: float, what: str) -> None:
    asym = float(np.abs(m - m.conj().T).max())
    if asym > tol:
        raise NotHermitian(f"{what} is not Hermitian: max asymmetry {asym:.3g} > {tol:.3g}")


def purity(rho: np.ndarray, *, herm_tol: float = PHYSICALITY_TOL) -> float:
    """Tr(rho^2) as a real number.

    The input must be Hermitian within ``herm_tol``; the imaginary residue of
    the trace is bounded by the same tolerance (1e-9 for exact inputs).
    """
    m = _as_square(rho, "rho")
    _require_hermitian(m, herm_tol, "rho")
    t = complex(np.trace(m @ m))
    if abs(t.imag) > max(ALGEBRAIC_TOL, herm_tol):
        raise NotHermitian(f"Tr(rho^2) has imaginary residue {t.imag:.3g}")
    return float(t.real)


def fidelity(rho1: np.ndarray, rho2: np.ndarray, *, herm_tol: float = PHYSICALITY_TOL) -> float:
    """Uhlmann fidelity F(rho1, rho2) = Tr sqrt(sqrt(rho1) rho2 sqrt(rho1)).

    ``rho1`` must be a physical state: Hermitian and positive semidefinite
    (eigenvalues below -1e-6 raise :class:`StronglyNonPositive`).  ``rho2``
    must be Hermitian within ``herm_tol`` but may be a raw, slightly
    nonpositive reconstruction.  When ``rho1`` is pure the shortcut
    ``sqrt(<psi| rho2 |psi>)`` is used; this is the convention under which the
    reference fidelities of this experiment are quoted.
    """
    a = _as_square(rho1, "rho1")
    b = _as_square(rho2, "rho2")
    if a.shape != b.shape:
        raise DimensionMismatch(f"shape mismatch: {a.shape} vs {b.shape}")
    _require_hermitian(a, herm_tol, "rho1")
    _require_hermitian(b, herm_tol, "rho2")

    evals, evecs = np.linalg.eigh((a + a.conj().T) / 2)
    if evals.min() < -PHYSICALITY_TOL:
        raise StronglyNonPositive(f"rho1 has eigenvalue {evals.min():.3g} < -1e-6")
    if float(np.real(np.trace(a @ a))) > 1.0 - ALGEBRAIC_TOL:
        psi = evecs[:, int(np.argmax(evals))]
        overlap = float(np.real(psi.conj() @ b @ psi))
        return float(np.sqrt(max(overlap, 0.0)))

    sqrt_a = (evecs * np.sqrt(np.clip(evals, 0.0, None))) @ evecs.conj().T
    inner = sqrt_a @ b @ sqrt_a
    mu = np.linalg.eigvalsh((inner + inner.conj().T) / 2)
    return float(np.sqrt(np.clip(mu, 0.0, None)).sum())


@dataclass(frozen=True)
class DeviationReport:
    """Entrywise |difference| statistics between two matrices of dimension ``dim``."""

    average: float
    maximum: float
    dim: int


def deviation(expected: np.ndarray, actual: np.ndarray) -> DeviationReport:
    """Average and maximum complex modulus of the entrywise difference.

    The average runs over all dim^2 entries.  The modulus (not the real part)
    is what the reference percentages are quoted in.
    """
    e = _as_square(expected, "expected")
    a = _as_square(actual, "actual")
    if e.shape != a.shape:
        raise DimensionMismatch(f"shape mismatch: {e.shape} vs {a.shape}")
    diff = np.abs(e - a)
    return DeviationReport(float(diff.mean()), float(diff.max()), e.shape[0])


def make_physical(rho_raw: np.ndarray) -> tuple[np.ndarray, bool]:
    """Project a raw reconstruction onto the physical states.

    Symmetrizes, clips negative eigenvalues to zero and renormalizes the
    trace to one.  Returns ``(rho, clipped)`` where ``clipped`` reports
    whether any eigenvalue was actually negative.  Idempotent within 1e-12.
    """
    m = _as_square(rho_raw, "rho_raw")
    asym = float(np.abs(m - m.conj().T).max())
    if asym > 1e-3:
        raise GrosslyNonHermitian(f"asymmetry {asym:.3g} > 1e-3")
    evals, evecs = np.linalg.eigh((m + m.conj().T) / 2)
    clipped = bool(evals.min() < -1e-12)
    evals = np.clip(evals, 0.0, None)
    total = float(evals.sum())
    if total <= 0.0:
        raise StronglyNonPositive("matrix has no positive weight to normalize")
    rho = (evecs * (evals / total)) @ evecs.conj().T
    return rho, clipped


def partial_trace(rho: np.ndarray, keep: Iterable[int], n_qubits: int | None = None) -> np.ndarray:
    """Reduced density matrix on the ``keep`` qubits (ascending index order)."""
    m = _as_square(rho, "rho")
    n = n_qubits if n_qubits is not None else int(round(np.log2(m.shape[0])))
    if m.shape[0] != 2 ** n:
        raise DimensionMismatch(f"dimension {m.shape[0]} is not 2^{n}")
    kept = sorted(set(keep))
    if any(q < 0 or q >= n for q in kept):
        raise DimensionMismatch(f"keep={kept} out of range for {n} qubits")
    t = m.reshape((2,) * (2 * n))
    row = list(range(n))
    col = list(range(n, 2 * n))
    for q in range(n):
        if q not in kept:
            col[q] = row[q]
    out = [row[q] for q in kept] + [col[q] for q in kept]
    d = 2 ** len(kept)
    return np.einsum(t, row + col, out).reshape(d, d)
