"""Shot-based sampling of circuits under a simple hardware noise model.

Noise model: a depolarizing channel acts on the touched qubits after every
gate (one strength for single-qubit gates, one for CNOTs) and readout applies
an independent classical bit flip to each measured bit.  The depolarizing
strength ``p`` is the full-replacement probability,

    rho -> (1 - p) rho + p * (tr_S rho) (x) I/2^k,

equivalent to each of the 4^k - 1 non-identity Pauli errors occurring with
probability p / 4^k, so p = 1 leaves the touched qubits maximally mixed.

Sampling is deterministic: the generator is the counter-based Philox keyed by
``(seed, stream)`` and outcomes are drawn by vectorized inverse-CDF lookup,
so a given seed reproduces the histogram bit for bit.  ``exact_distribution``
evolves the density matrix and applies the readout channel analytically; it
is the infinite-shot oracle for ``sample``.
"""
from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Mapping

import numpy as np

from . import qmath
from .circuit import Circuit, gate_unitary
from .errors import (
    DimensionMismatch,
    IdentityInSetting,
    NoMeasurements,
    ParseError,
    ZeroShots,
)

_MASK64 = (1 << 64) - 1


@dataclass(frozen=True)
class NoiseModel:
    per_gate_depolarizing: float = 0.0
    per_cnot_depolarizing: float = 0.0
    readout_flip: float = 0.0

    def __post_init__(self) -> None:
        for name in ("per_gate_depolarizing", "per_cnot_depolarizing", "readout_flip"):
            p = getattr(self, name)
            if not 0.0 <= p <= 1.0:
                raise ValueError(f"{name} must be in [0, 1], got {p}")

    @property
    def is_ideal(self) -> bool:
        return (
            self.per_gate_depolarizing == 0.0
            and self.per_cnot_depolarizing == 0.0
            and self.readout_flip == 0.0
        )


IDEAL = NoiseModel()


@dataclass(frozen=True)
class CountsHistogram:
    """Outcome counts over the measured bits, keys in qubit-index order."""

    n_bits: int
    shots: int
    counts: Mapping[str, int] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if self.n_bits < 1:
            raise DimensionMismatch("histogram needs at least one bit")
        coerced: dict[str, int] = {}
        for key, cnt in dict(self.counts).items():
            if len(key) != self.n_bits or any(b not in "01" for b in key):
                raise ParseError(f"bad outcome key {key!r} for {self.n_bits} bits")
            if not isinstance(cnt, (int, np.integer)) or cnt < 0:
                raise ParseError(f"bad count {cnt!r} for outcome {key!r}")
            coerced[key] = int(cnt)
        object.__setattr__(self, "counts", coerced)
        if sum(coerced.values()) != self.shots:
            raise ParseError(f"counts sum to {sum(coerced.values())}, expected {self.shots} shots")

    def probability(self, outcome: str) -> float:
        return self.counts.get(outcome, 0) / self.shots

    def to_json_dict(self) -> dict:
        return {
            "n_bits": self.n_bits,
            "shots": self.shots,
            "counts": {k: self.counts[k] for k in sorted(self.counts)},
        }

    @classmethod
    def from_json_dict(cls, data: dict) -> "CountsHistogram":
        try:
            return cls(int(data["n_bits"]), int(data["shots"]), dict(data["counts"]))
        except (KeyError, TypeError, ValueError) as exc:
            raise ParseError(f"bad counts payload: {exc}") from exc

    @classmethod
    def from_json(cls, text: str) -> "CountsHistogram":
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ParseError(f"bad counts JSON: {exc}") from exc
        return cls.from_json_dict(data)


@lru_cache(maxsize=256)
def _twirl_operators(n: int, qubits: tuple[int, ...]) -> tuple[np.ndarray, ...]:
    # Full Pauli group on the touched qubits; averaging over it replaces
    # their state with I/2^k.
    ops = []
    for combo in itertools.product("IXYZ", repeat=len(qubits)):
        label = ["I"] * n
        for q, ch in zip(qubits, combo):
            label[q] = ch
        ops.append(qmath.pauli_operator("".join(label)))
    return tuple(ops)


def _depolarize(rho: np.ndarray, qubits: tuple[int, ...], n: int, p: float) -> np.ndarray:
    if p == 0.0:
        return rho
    ops = _twirl_operators(n, tuple(sorted(qubits)))
    mixed = sum(op @ rho @ op for op in ops) / len(ops)
    return (1.0 - p) * rho + p * mixed


def final_density(circuit: Circuit, noise: NoiseModel = IDEAL) -> np.ndarray:
    """Density matrix after the circuit's gates and their noise channels."""
    n = circuit.n_qubits
    rho = qmath.projector(qmath.ket("0" * n))
    for g in circuit.gates:
        u = gate_unitary(g, n)
        rho = u @ rho @ u.conj().T
        p = noise.per_cnot_depolarizing if g.kind == "CNOT" else noise.per_gate_depolarizing
        if p > 0.0:
            rho = _depolarize(rho, g.qubits, n, p)
    return rho


def _measured_probs(rho: np.ndarray, measured: tuple[int, ...], n: int) -> np.ndarray:
    probs = np.real(np.diag(rho)).reshape((2,) * n)
    drop = tuple(q for q in range(n) if q not in measured)
    if drop:
        probs = probs.sum(axis=drop)
    probs = np.clip(probs.reshape(-1), 0.0, None)
    return probs / probs.sum()


def _flip_channel(probs: np.ndarray, m: int, r: float) -> np.ndarray:
    t = probs.reshape((2,) * m)
    for axis in range(m):
        t = (1.0 - r) * t + r * np.flip(t, axis=axis)
    return t.reshape(-1)


def exact_distribution(circuit: Circuit, noise: NoiseModel = IDEAL) -> dict[str, float]:
    """Infinite-shot outcome probabilities over the measured bits."""
    if not circuit.measured:
        raise NoMeasurements("circuit has no measured qubits")
    measured = tuple(sorted(circuit.measured))
    probs = _measured_probs(final_density(circuit, noise), measured, circuit.n_qubits)
    if noise.readout_flip > 0.0:
        probs = _flip_channel(probs, len(measured), noise.readout_flip)
    m = len(measured)
    return {format(i, f"0{m}b"): float(p) for i, p in enumerate(probs)}


def sample(
    circuit: Circuit,
    shots: int,
    noise: NoiseModel = IDEAL,
    seed: int = 0,
    stream: int = 0,
) -> CountsHistogram:
    """Draw ``shots`` outcomes; readout flips are applied per sampled string."""
    if not circuit.measured:
        raise NoMeasurements("circuit has no measured qubits")
    if not isinstance(shots, int) or shots < 1:
        raise ZeroShots(f"shots must be a positive integer, got {shots!r}")
    measured = tuple(sorted(circuit.measured))
    m = len(measured)
    probs = _measured_probs(final_density(circuit, noise), measured, circuit.n_qubits)
    cdf = np.cumsum(probs)
    cdf[-1] = 1.0

    rng = np.random.Generator(np.random.Philox(key=[seed & _MASK64, stream & _MASK64]))
    outcomes = np.searchsorted(cdf, rng.random(shots), side="right").astype(np.int64)
    if noise.readout_flip > 0.0:
        flips = rng.random((shots, m)) < noise.readout_flip
        weights = 1 << np.arange(m - 1, -1, -1, dtype=np.int64)
        outcomes ^= flips.astype(np.int64) @ weights
    counts = np.bincount(outcomes, minlength=2 ** m)
    hist = {
        format(i, f"0{m}b"): int(c) for i, c in enumerate(counts) if c > 0
    }
    return CountsHistogram(n_bits=m, shots=shots, counts=hist)


def with_basis_change(circuit: Circuit, setting: str) -> Circuit:
    """Append the pre-measurement rotations for a Pauli setting and measure all.

    X appends H; Y appends S-dagger then H; Z appends nothing.  The setting
    must name a basis for every qubit: identity slots are not measurable.
    """
    if len(setting) != circuit.n_qubits:
        raise DimensionMismatch(
            f"setting {setting!r} has {len(setting)} letters for {circuit.n_qubits} qubits"
        )
    if "I" in setting:
        raise IdentityInSetting(f"setting {setting!r} contains identity")
    if any(ch not in "XYZ" for ch in setting):
        raise ValueError(f"setting {setting!r} has letters outside X, Y, Z")
    out = circuit
    for q, ch in enumerate(setting):
        if ch == "X":
            out = out.h(q)
        elif ch == "Y":
            out = out.sdg(q).h(q)
    return out.measure(*range(circuit.n_qubits))
