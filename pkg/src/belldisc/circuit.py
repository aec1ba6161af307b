"""Gate-level circuit model, ideal simulation and the experiment's circuits.

A circuit is an immutable sequence of gates from the set {H, X, S, SDG, CNOT}
on ``n_qubits`` wires plus a set of terminal measurement markers.  Markers are
terminal by construction: appending a gate to a measured qubit raises.

Bit and ket conventions follow :mod:`belldisc.qmath` (qubit 0 = leftmost =
most significant).  Bell-pair labels follow the convention of this experiment:
``psi+- = (|00> +- |11>)/sqrt(2)`` (even parity) and
``phi+- = (|01> +- |10>)/sqrt(2)`` (odd parity).
"""
from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from functools import lru_cache

import numpy as np

from . import qmath
from .errors import (
    BadQubitIndex,
    DimensionMismatch,
    HasMeasurements,
    HasMeasurementsBeforeEnd,
    ParseError,
)

GATE_KINDS = ("H", "X", "S", "SDG", "CNOT")

_ONE_QUBIT = {
    "H": np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "S": np.array([[1, 0], [0, 1j]], dtype=complex),
    "SDG": np.array([[1, 0], [0, -1j]], dtype=complex),
}


@dataclass(frozen=True)
class Gate:
    kind: str
    target: int
    control: int | None = None

    def __post_init__(self) -> None:
        if self.kind not in GATE_KINDS:
            raise ValueError(f"unknown gate kind {self.kind!r}")
        if self.kind == "CNOT":
            if self.control is None:
                raise ValueError("CNOT needs a control qubit")
            if self.control == self.target:
                raise BadQubitIndex("CNOT control and target must differ")
        elif self.control is not None:
            raise ValueError(f"{self.kind} takes no control qubit")
        for q in self.qubits:
            if q < 0:
                raise BadQubitIndex(f"negative qubit index {q}")

    @property
    def qubits(self) -> tuple[int, ...]:
        if self.control is None:
            return (self.target,)
        return (self.control, self.target)

    def text(self) -> str:
        if self.kind == "CNOT":
            return f"CNOT {self.control} {self.target}"
        return f"{self.kind} {self.target}"


@dataclass(frozen=True)
class Circuit:
    n_qubits: int
    gates: tuple[Gate, ...] = ()
    measured: frozenset[int] = field(default_factory=frozenset)

    def __post_init__(self) -> None:
        if self.n_qubits < 1:
            raise BadQubitIndex("a circuit needs at least one qubit")
        object.__setattr__(self, "gates", tuple(self.gates))
        object.__setattr__(self, "measured", frozenset(self.measured))
        for g in self.gates:
            for q in g.qubits:
                if q >= self.n_qubits:
                    raise BadQubitIndex(f"gate {g.text()!r} outside register of {self.n_qubits}")
        for q in self.measured:
            if not 0 <= q < self.n_qubits:
                raise BadQubitIndex(f"measured qubit {q} outside register of {self.n_qubits}")

    # -- construction (every method returns a new circuit) --

    def append(self, gate: Gate) -> "Circuit":
        touched = set(gate.qubits) & self.measured
        if touched:
            raise HasMeasurementsBeforeEnd(f"qubit(s) {sorted(touched)} already measured")
        return Circuit(self.n_qubits, self.gates + (gate,), self.measured)

    def h(self, q: int) -> "Circuit":
        return self.append(Gate("H", q))

    def x(self, q: int) -> "Circuit":
        return self.append(Gate("X", q))

    def s(self, q: int) -> "Circuit":
        return self.append(Gate("S", q))

    def sdg(self, q: int) -> "Circuit":
        return self.append(Gate("SDG", q))

    def cnot(self, control: int, target: int) -> "Circuit":
        return self.append(Gate("CNOT", target, control))

    def measure(self, *qubits: int) -> "Circuit":
        return Circuit(self.n_qubits, self.gates, self.measured | set(qubits))

    def extend(self, other: "Circuit") -> "Circuit":
        """Concatenate another circuit on the same register."""
        if other.n_qubits != self.n_qubits:
            raise DimensionMismatch(
                f"cannot extend a {self.n_qubits}-qubit circuit with a {other.n_qubits}-qubit one"
            )
        out = self
        for g in other.gates:
            out = out.append(g)
        return out.measure(*other.measured)

    @property
    def gate_count(self) -> int:
        return len(self.gates)

    @property
    def cnot_count(self) -> int:
        return sum(1 for g in self.gates if g.kind == "CNOT")


# -- simulation --

@lru_cache(maxsize=4096)
def _gate_unitary(kind: str, target: int, control: int | None, n: int) -> np.ndarray:
    if kind != "CNOT":
        factors = [_ONE_QUBIT[kind] if q == target else qmath.PAULI["I"] for q in range(n)]
        u = qmath.tensor(*factors)
    else:
        dim = 2 ** n
        u = np.zeros((dim, dim), dtype=complex)
        cbit = n - 1 - control
        tbit = n - 1 - target
        for b in range(dim):
            dst = b ^ (1 << tbit) if (b >> cbit) & 1 else b
            u[dst, b] = 1.0
    u.setflags(write=False)
    return u


def gate_unitary(gate: Gate, n_qubits: int) -> np.ndarray:
    """Full 2^n x 2^n unitary of a single gate (read-only, cached)."""
    return _gate_unitary(gate.kind, gate.target, gate.control, n_qubits)


def simulate(circuit: Circuit, initial: np.ndarray | None = None) -> np.ndarray:
    """Final state vector; measurement markers are ignored here."""
    dim = 2 ** circuit.n_qubits
    if initial is None:
        state = qmath.ket("0" * circuit.n_qubits)
    else:
        state = np.asarray(initial, dtype=complex).reshape(-1)
        if state.shape[0] != dim:
            raise DimensionMismatch(f"initial state has dim {state.shape[0]}, circuit needs {dim}")
        state = state.copy()
    for g in circuit.gates:
        state = gate_unitary(g, circuit.n_qubits) @ state
    return state


def unitary_of(circuit: Circuit) -> np.ndarray:
    """Full unitary of a measurement-free circuit."""
    if circuit.measured:
        raise HasMeasurements("circuit has measurement markers")
    u = np.eye(2 ** circuit.n_qubits, dtype=complex)
    for g in circuit.gates:
        u = gate_unitary(g, circuit.n_qubits) @ u
    return u


def equivalent_up_to_phase(u1: np.ndarray, u2: np.ndarray, atol: float = qmath.ALGEBRAIC_TOL) -> bool:
    """Whether two operators agree up to a global phase.

    The phase is fixed by rotating each operator's largest-modulus entry to
    the positive real axis.
    """
    a = np.asarray(u1, dtype=complex)
    b = np.asarray(u2, dtype=complex)
    if a.shape != b.shape:
        return False

    def fix(m: np.ndarray) -> np.ndarray:
        z = m.flat[int(np.argmax(np.abs(m)))]
        if abs(z) == 0.0:
            return m
        return m * (z.conjugate() / abs(z))

    return bool(np.abs(fix(a) - fix(b)).max() <= atol)


# -- Bell pairs and the experiment's circuit blocks --

class BellKind(Enum):
    PSI_PLUS = "psi+"
    PSI_MINUS = "psi-"
    PHI_PLUS = "phi+"
    PHI_MINUS = "phi-"

    @property
    def parity_bit(self) -> int:
        """Parity-check ancilla outcome: 0 for psi (even parity), 1 for phi."""
        return 1 if self in (BellKind.PHI_PLUS, BellKind.PHI_MINUS) else 0

    @property
    def phase_bit(self) -> int:
        """Phase-check ancilla outcome: 0 for +, 1 for -."""
        return 1 if self in (BellKind.PSI_MINUS, BellKind.PHI_MINUS) else 0

    @classmethod
    def from_token(cls, token: str) -> "BellKind":
        for kind in cls:
            if kind.value == token:
                return kind
        raise ValueError(f"unknown Bell label {token!r}")


def bell_vector(kind: BellKind) -> np.ndarray:
    """Two-qubit Bell state in this experiment's labeling."""
    sign = -1.0 if kind.phase_bit else 1.0
    if kind.parity_bit:
        return (qmath.ket("01") + sign * qmath.ket("10")) / np.sqrt(2)
    return (qmath.ket("00") + sign * qmath.ket("11")) / np.sqrt(2)


def composite_state(kind: BellKind, ancilla_bit: int) -> np.ndarray:
    """Bell pair on qubits (0, 1) joined by an ancilla qubit in |0> or |1>."""
    if ancilla_bit not in (0, 1):
        raise ValueError("ancilla_bit must be 0 or 1")
    return np.kron(bell_vector(kind), qmath.ket(str(ancilla_bit)))


def bell_prep(kind: BellKind, system: tuple[int, int] = (0, 1), n_qubits: int = 3) -> Circuit:
    """Prepare a Bell pair on the system qubits from |0...0>.

    X gates load the bit pattern |phase_bit, parity_bit>, then H + CNOT turn
    it into the corresponding Bell pair.
    """
    a, b = system
    c = Circuit(n_qubits)
    if kind.phase_bit:
        c = c.x(a)
    if kind.parity_bit:
        c = c.x(b)
    return c.h(a).cnot(a, b)


def reverse_epr(system: tuple[int, int] = (0, 1), n_qubits: int = 3) -> Circuit:
    """Inverse of the Bell basis change: maps a Bell pair back to |phase_bit, parity_bit>."""
    a, b = system
    return Circuit(n_qubits).cnot(a, b).h(a)


def parity_check(system: tuple[int, int] = (0, 1), ancilla: int = 2, n_qubits: int = 3) -> Circuit:
    """Copy the pair's parity onto the ancilla: CNOTs from both system qubits."""
    a, b = system
    return Circuit(n_qubits).cnot(a, ancilla).cnot(b, ancilla)


def phase_check(system: tuple[int, int] = (0, 1), ancilla: int = 2, n_qubits: int = 3) -> Circuit:
    """Copy the pair's phase onto the ancilla: H, ancilla-controlled CNOTs, H."""
    a, b = system
    return Circuit(n_qubits).h(ancilla).cnot(ancilla, a).cnot(ancilla, b).h(ancilla)


def combined_check(
    system: tuple[int, int] = (0, 1),
    phase_ancilla: int = 2,
    parity_ancilla: int = 3,
    n_qubits: int = 4,
) -> Circuit:
    """Phase check followed by parity check on two separate ancillas."""
    c = phase_check(system, phase_ancilla, n_qubits)
    return c.extend(parity_check(system, parity_ancilla, n_qubits))


def discrimination_circuit(
    kind: BellKind,
    check: str,
    system: tuple[int, int] = (0, 1),
    ancilla: int = 2,
    n_qubits: int = 3,
) -> Circuit:
    """Prep + one check block + reverse EPR, as run for the outcome histograms."""
    if check == "parity":
        block = parity_check(system, ancilla, n_qubits)
    elif check == "phase":
        block = phase_check(system, ancilla, n_qubits)
    else:
        raise ValueError(f"check must be 'parity' or 'phase', got {check!r}")
    c = bell_prep(kind, system, n_qubits).extend(block)
    return c.extend(reverse_epr(system, n_qubits))


# -- text format --

def format_circuit(circuit: Circuit) -> str:
    """One gate per line (``H 0``, ``CNOT 1 2``), measurement markers last."""
    lines = [g.text() for g in circuit.gates]
    lines += [f"MEAS {q}" for q in sorted(circuit.measured)]
    return "\n".join(lines) + "\n"


def parse_circuit(text: str, n_qubits: int | None = None) -> Circuit:
    """Parse the text format back into a circuit.

    The register size is inferred from the largest index unless given.  Blank
    lines and ``#`` comments are allowed.  A gate following a MEAS marker on
    the same qubit raises :class:`HasMeasurementsBeforeEnd`.
    """
    ops: list[tuple[str, tuple[int, ...]]] = []
    max_index = -1
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        mnemonic = parts[0].upper()
        try:
            args = tuple(int(p) for p in parts[1:])
        except ValueError as exc:
            raise ParseError(f"line {lineno}: bad qubit index in {raw!r}") from exc
        if mnemonic == "MEAS":
            if len(args) != 1:
                raise ParseError(f"line {lineno}: MEAS takes one qubit")
        elif mnemonic == "CNOT":
            if len(args) != 2:
                raise ParseError(f"line {lineno}: CNOT takes control and target")
        elif mnemonic in _ONE_QUBIT:
            if len(args) != 1:
                raise ParseError(f"line {lineno}: {mnemonic} takes one qubit")
        else:
            raise ParseError(f"line {lineno}: unknown mnemonic {parts[0]!r}")
        if any(a < 0 for a in args):
            raise ParseError(f"line {lineno}: negative qubit index")
        ops.append((mnemonic, args))
        max_index = max(max_index, *args)
    if not ops:
        raise ParseError("empty circuit text")
    n = n_qubits if n_qubits is not None else max_index + 1
    circuit = Circuit(n)
    for mnemonic, args in ops:
        if mnemonic == "MEAS":
            circuit = circuit.measure(args[0])
        elif mnemonic == "CNOT":
            circuit = circuit.cnot(args[0], args[1])
        else:
            circuit = circuit.append(Gate(mnemonic, args[0]))
    return circuit
