"""Protective and non-protective photon experiments as qubit circuits.

Polarisation is one qubit (``|0> = H``, ``|1> = V``). The birefringent
crystal translates the pointer register on the H branch only, which the
engine expresses as polarity-0 controls on the phase-shift gates.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Optional

import numpy as np

from photonsim.errors import DomainError
from photonsim.pointer import (
    DEFAULT_LAMBDA,
    SINGLE_QUBIT_PRODUCT,
    PhaseShiftSpec,
    PointerGrid,
    gaussian_amplitudes,
    translation_ops,
)
from photonsim.statevector import (
    Circuit,
    GateOp,
    PrepareState,
    StateVector,
    exact_probability,
    run_circuit,
    sample_indices,
)
from photonsim.theory import MODES, NONPROTECTIVE, PROTECTIVE

HADAMARD = np.array([[1, 1], [1, -1]]) / math.sqrt(2)
PAULI_X = np.array([[0, 1], [1, 0]], dtype=float)

BETA = 3 * math.pi / 8
SWAP_ANGLE = math.pi / 4


def hwp_gate(angle: float) -> np.ndarray:
    """Half-wave plate with fast axis at ``angle`` (radians)."""
    c, s = math.cos(2 * angle), math.sin(2 * angle)
    return np.array([[c, s], [s, -c]])


@dataclass(frozen=True)
class ExperimentConfig:
    mode: str = PROTECTIVE
    steps: int = 0
    alpha: float = math.pi / 8
    beta: float = BETA
    lam: float = DEFAULT_LAMBDA
    grid: PointerGrid = field(default_factory=PointerGrid)
    shots: int = 5000
    seed: int = 0
    style: str = SINGLE_QUBIT_PRODUCT

    def __post_init__(self):
        if self.mode not in MODES:
            raise DomainError(f"mode must be one of {MODES}, got {self.mode!r}")
        if self.steps < 0:
            raise DomainError("steps must be non-negative")
        if self.shots < 1:
            raise DomainError("shots must be >= 1")
        if not 0 <= self.alpha <= math.pi / 2:
            raise DomainError("alpha must lie in [0, pi/2]")
        if not math.isclose(self.beta, BETA):
            raise DomainError("beta is fixed at 3*pi/8")


@dataclass(frozen=True)
class QubitLayout:
    pointer: tuple
    polarization: int
    ancillas: tuple = ()

    def __post_init__(self):
        allq = list(self.pointer) + [self.polarization] + list(self.ancillas)
        if len(set(allq)) != len(allq):
            raise DomainError("layout qubits must be distinct")

    @property
    def num_qubits(self) -> int:
        return len(self.pointer) + 1 + len(self.ancillas)

    @classmethod
    def for_config(cls, cfg: ExperimentConfig) -> "QubitLayout":
        nq = cfg.grid.num_qubits
        n_anc = cfg.steps if cfg.mode == PROTECTIVE else 0
        return cls(tuple(range(nq)), nq, tuple(range(nq + 1, nq + 1 + n_anc)))


@dataclass(frozen=True)
class RunResult:
    n: int
    p_exact: float
    p_shots: Optional[float] = None
    kept: Optional[int] = None
    total: Optional[int] = None
    stderr: Optional[float] = None
    # non-protective only: probability of the reflected port
    p_reflected: Optional[float] = None


def polarizer_gadget(layout: QubitLayout, step_index: int) -> list:
    """Ancilla circuit whose ``ancilla = 0`` branch applies ``(I + X) / 2`` to polarisation.

    ``step_index`` counts from 0 and selects ``layout.ancillas[step_index]``.
    """
    a = layout.ancillas[step_index]
    p = layout.polarization
    return [GateOp(a, HADAMARD), GateOp(p, PAULI_X, ((a, 1),)), GateOp(a, HADAMARD)]


def _crystal(cfg: ExperimentConfig, layout: QubitLayout) -> list:
    spec = PhaseShiftSpec(cfg.lam, cfg.grid.coupling, cfg.style)
    return translation_ops(spec, layout.pointer, controls=((layout.polarization, 0),))


def _preamble(cfg: ExperimentConfig, layout: QubitLayout) -> Circuit:
    circuit = Circuit(layout.num_qubits)
    circuit.append(PrepareState(layout.pointer, gaussian_amplitudes(cfg.grid)))
    circuit.append(GateOp(layout.polarization, hwp_gate(cfg.alpha)))
    return circuit


def _analyser(cfg: ExperimentConfig, layout: QubitLayout) -> list:
    p = layout.polarization
    return [GateOp(p, hwp_gate(cfg.beta)), GateOp(p, hwp_gate(SWAP_ANGLE))]


def build_protective_circuit(cfg: ExperimentConfig):
    """Returns ``(circuit, layout, acceptance)``; acceptance pins every ancilla and ``p`` to 0."""
    cfg = replace(cfg, mode=PROTECTIVE)
    layout = QubitLayout.for_config(cfg)
    circuit = _preamble(cfg, layout)
    for k in range(cfg.steps):
        circuit.extend(_crystal(cfg, layout))
        circuit.extend(polarizer_gadget(layout, k))
    circuit.extend(_analyser(cfg, layout))
    acceptance = {a: 0 for a in layout.ancillas}
    acceptance[layout.polarization] = 0
    return circuit, layout, acceptance


def build_nonprotective_circuit(cfg: ExperimentConfig):
    """Returns ``(circuit, layout, ports)`` with ports ``{"T": {p: 0}, "R": {p: 1}}``."""
    cfg = replace(cfg, mode=NONPROTECTIVE)
    layout = QubitLayout.for_config(cfg)
    circuit = _preamble(cfg, layout)
    for _ in range(cfg.steps):
        circuit.extend(_crystal(cfg, layout))
    circuit.extend(_analyser(cfg, layout))
    p = layout.polarization
    return circuit, layout, {"T": {p: 0}, "R": {p: 1}}


def build_circuit(cfg: ExperimentConfig):
    if cfg.mode == PROTECTIVE:
        return build_protective_circuit(cfg)
    return build_nonprotective_circuit(cfg)


def simulate(cfg: ExperimentConfig):
    """Final statevector with its layout and acceptance constraint(s)."""
    circuit, layout, accept = build_circuit(cfg)
    return run_circuit(circuit), layout, accept


def _prob(state, constraint) -> float:
    # rounding can push a certain outcome a few ulps past 1
    return min(1.0, max(0.0, exact_probability(state, constraint)))


def _exact_from_state(cfg, state: StateVector, accept) -> RunResult:
    if cfg.mode == PROTECTIVE:
        return RunResult(cfg.steps, _prob(state, accept))
    return RunResult(cfg.steps, _prob(state, accept["T"]), p_reflected=_prob(state, accept["R"]))


def _shots_from_state(cfg, state: StateVector, layout: QubitLayout, accept,
                      shots: int, seed: int) -> RunResult:
    exact = _exact_from_state(cfg, state, accept)
    measured = list(layout.ancillas) + [layout.polarization]
    outcomes = sample_indices(state, measured, shots, seed)
    # accepted outcome is all-zero in both modes (ancillas 0 and p 0)
    kept = int(np.count_nonzero(outcomes == 0))
    p = kept / shots
    return replace(exact, p_shots=p, kept=kept, total=shots,
                   stderr=math.sqrt(p * (1 - p) / shots))


def run_exact(cfg: ExperimentConfig) -> RunResult:
    state, _, accept = simulate(cfg)
    return _exact_from_state(cfg, state, accept)


def run_shots(cfg: ExperimentConfig) -> RunResult:
    state, layout, accept = simulate(cfg)
    return _shots_from_state(cfg, state, layout, accept, cfg.shots, cfg.seed)


def run_repeats(cfg: ExperimentConfig, seeds) -> list:
    """One exact evolution, sampled once per seed."""
    state, layout, accept = simulate(cfg)
    return [_shots_from_state(cfg, state, layout, accept, cfg.shots, s) for s in seeds]


def sweep_steps(cfg: ExperimentConfig, n_max: int) -> list:
    """Exact and sampled results for ``n = 0 .. n_max``; step ``n`` uses seed ``cfg.seed + n``."""
    if n_max < 0:
        raise DomainError("n_max must be non-negative")
    return [run_shots(replace(cfg, steps=n, seed=cfg.seed + n)) for n in range(n_max + 1)]
