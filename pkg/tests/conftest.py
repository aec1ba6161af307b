"""Shared test helpers and the acceptance-criteria terminal summary."""
from __future__ import annotations

import numpy as np

from belldisc.circuit import Circuit, Gate

ACCEPTANCE_LINES: list[str] = []


def record(line: str) -> None:
    ACCEPTANCE_LINES.append(line)


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.line(line)


def random_state(rng: np.random.Generator, dim: int) -> np.ndarray:
    v = rng.normal(size=dim) + 1j * rng.normal(size=dim)
    return v / np.linalg.norm(v)


def random_density(rng: np.random.Generator, dim: int, rank: int | None = None) -> np.ndarray:
    r = rank or dim
    a = rng.normal(size=(dim, r)) + 1j * rng.normal(size=(dim, r))
    rho = a @ a.conj().T
    return rho / np.trace(rho).real


def random_circuit(rng: np.random.Generator, n_qubits: int, max_gates: int) -> Circuit:
    c = Circuit(n_qubits)
    n_gates = int(rng.integers(1, max_gates + 1))
    for _ in range(n_gates):
        kind = rng.choice(["H", "X", "S", "SDG", "CNOT"])
        if kind == "CNOT" and n_qubits >= 2:
            control, target = rng.choice(n_qubits, size=2, replace=False)
            c = c.cnot(int(control), int(target))
        elif kind != "CNOT":
            c = c.append(Gate(kind, int(rng.integers(n_qubits))))
    return c
