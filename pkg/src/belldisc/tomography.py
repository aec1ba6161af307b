"""Full Pauli state tomography by linear inversion.

The density matrix of an n-qubit state decomposes as

    rho = (1/2^n) sum_L  c_L  sigma_L,      c_L = <sigma_L>,

with L running over all 4^n Pauli labels.  Every coefficient is estimated
from one of the 3^n measurement settings over {X, Y, Z}: identity slots are
filled with Z (any basis works; Z is the canonical choice) and the sign of
each outcome is (-1)^(number of 1 bits at the non-identity positions).
``c_{II...I}`` is pinned to 1 by normalization.  Reconstruction is plain
linear inversion; :func:`belldisc.qmath.make_physical` supplies the projected
variant reported alongside the raw matrix.
"""
from __future__ import annotations

import itertools
import json
from dataclasses import dataclass
from typing import Mapping

import numpy as np

from . import qmath
from .circuit import Circuit
from .errors import (
    DimensionMismatch,
    HasMeasurements,
    IncompleteTable,
    InconsistentShotTotals,
    MissingSetting,
    TooManyQubits,
)
from .sampler import IDEAL, CountsHistogram, NoiseModel, sample, with_basis_change

MAX_TOMOGRAPHY_QUBITS = 4


@dataclass(frozen=True)
class TomographyPlan:
    n_qubits: int
    settings: tuple[str, ...]


def plan(n_qubits: int) -> TomographyPlan:
    """All 3^n measurement settings over {X, Y, Z}, lexicographic."""
    if n_qubits < 1:
        raise ValueError("n_qubits must be at least 1")
    if n_qubits > MAX_TOMOGRAPHY_QUBITS:
        raise TooManyQubits(f"{n_qubits} qubits would need 3^{n_qubits} settings")
    settings = tuple("".join(s) for s in itertools.product("XYZ", repeat=n_qubits))
    return TomographyPlan(n_qubits, settings)


def _labels(n_qubits: int) -> tuple[str, ...]:
    return tuple("".join(s) for s in itertools.product("IXYZ", repeat=n_qubits))


@dataclass(frozen=True)
class ExpectationTable:
    n_qubits: int
    values: dict[str, float]


def expectations_from_counts(
    tomo_plan: TomographyPlan, histograms: Mapping[str, CountsHistogram]
) -> ExpectationTable:
    """Estimate every Pauli coefficient from the per-setting histograms."""
    n = tomo_plan.n_qubits
    shot_totals = set()
    for setting in tomo_plan.settings:
        hist = histograms.get(setting)
        if hist is None:
            raise MissingSetting(f"no histogram for setting {setting}")
        if hist.n_bits != n:
            raise DimensionMismatch(f"histogram for {setting} has {hist.n_bits} bits, plan has {n}")
        shot_totals.add(hist.shots)
    if len(shot_totals) != 1:
        raise InconsistentShotTotals(f"shot totals differ across settings: {sorted(shot_totals)}")

    values: dict[str, float] = {}
    for label in _labels(n):
        if label == "I" * n:
            values[label] = 1.0
            continue
        setting = label.replace("I", "Z")
        hist = histograms[setting]
        positions = [i for i, ch in enumerate(label) if ch != "I"]
        acc = 0
        for outcome, cnt in hist.counts.items():
            sign = -1 if sum(int(outcome[i]) for i in positions) % 2 else 1
            acc += sign * cnt
        values[label] = acc / hist.shots
    return ExpectationTable(n, values)


def exact_expectations(rho: np.ndarray) -> ExpectationTable:
    """Noise-free coefficients Tr(rho sigma_L); oracle for the estimator."""
    m = np.asarray(rho, dtype=complex)
    n = int(round(np.log2(m.shape[0])))
    if m.shape != (2 ** n, 2 ** n):
        raise DimensionMismatch(f"not a square power-of-two matrix: {m.shape}")
    values = {
        label: float(np.real(np.trace(m @ qmath.pauli_operator(label))))
        for label in _labels(n)
    }
    return ExpectationTable(n, values)


def reconstruct(table: ExpectationTable) -> np.ndarray:
    """Linear inversion: rho = (1/2^n) sum_L c_L sigma_L."""
    n = table.n_qubits
    dim = 2 ** n
    rho = np.zeros((dim, dim), dtype=complex)
    for label in _labels(n):
        if label not in table.values:
            raise IncompleteTable(f"missing coefficient for {label}")
        rho += table.values[label] * qmath.pauli_operator(label)
    return rho / dim


@dataclass(frozen=True)
class TomographyReport:
    """Everything computed from one tomography run.

    ``fidelity_to_ideal`` follows the convention of the reference experiment:
    it is evaluated on the raw linear-inversion matrix (pure-state branch
    when the ideal is pure).  The projected matrix is carried alongside.
    """

    raw: np.ndarray
    physical: np.ndarray
    fidelity_to_ideal: float
    deviation: qmath.DeviationReport
    purity: float
    clipped: bool
    n_qubits: int
    shots: int
    seed: int

    def to_json_dict(self, label: str = "", ideal: str = "") -> dict:
        def parts(m: np.ndarray) -> dict:
            return {
                "re": [[round(float(v), 6) for v in row] for row in m.real.tolist()],
                "im": [[round(float(v), 6) for v in row] for row in m.imag.tolist()],
            }

        return {
            "label": label,
            "ideal": ideal,
            "n_qubits": self.n_qubits,
            "shots": self.shots,
            "seed": self.seed,
            "fidelity_to_ideal": round(self.fidelity_to_ideal, 6),
            "purity": round(self.purity, 6),
            "clipped": self.clipped,
            "deviation": {
                "average": round(self.deviation.average, 6),
                "maximum": round(self.deviation.maximum, 6),
            },
            "raw": parts(self.raw),
            "physical": parts(self.physical),
        }

    def to_json(self, label: str = "", ideal: str = "") -> str:
        return json.dumps(self.to_json_dict(label, ideal), indent=1)


def run_tomography(
    circuit: Circuit,
    ideal: np.ndarray,
    shots: int = 8192,
    noise: NoiseModel = IDEAL,
    seed: int = 0,
) -> TomographyReport:
    """Sample all settings, estimate coefficients, reconstruct and score.

    The per-setting sampling streams are derived from the setting index, so a
    root seed pins the whole run.  ``ideal`` may be a density matrix or a
    pure state vector.
    """
    if circuit.measured:
        raise HasMeasurements("tomography appends its own measurements")
    ideal_m = np.asarray(ideal, dtype=complex)
    if ideal_m.ndim == 1:
        ideal_m = qmath.projector(ideal_m)
    dim = 2 ** circuit.n_qubits
    if ideal_m.shape != (dim, dim):
        raise DimensionMismatch(f"ideal has shape {ideal_m.shape}, circuit needs {(dim, dim)}")

    tomo_plan = plan(circuit.n_qubits)
    histograms = {
        setting: sample(with_basis_change(circuit, setting), shots, noise, seed, stream=index)
        for index, setting in enumerate(tomo_plan.settings)
    }
    table = expectations_from_counts(tomo_plan, histograms)
    raw = reconstruct(table)
    physical, clipped = qmath.make_physical(raw)
    return TomographyReport(
        raw=raw,
        physical=physical,
        fidelity_to_ideal=qmath.fidelity(ideal_m, raw),
        deviation=qmath.deviation(ideal_m, raw),
        purity=qmath.purity(raw),
        clipped=clipped,
        n_qubits=circuit.n_qubits,
        shots=shots,
        seed=seed,
    )
