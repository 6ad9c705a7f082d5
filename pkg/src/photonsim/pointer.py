"""Gaussian pointer register: discretisation, translation and lambda calibration.

All lengths are in millimetres and hbar = 1. The momentum index ``p`` runs
over ``0 .. N-1`` without recentring, so a translation by a non-integer
number of grid sites is only approximate; ``lambda`` absorbs the mismatch.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from photonsim.errors import DomainError
from photonsim.statevector import (
    Circuit,
    GateOp,
    QftBlock,
    StateVector,
    fidelity,
    init_from_amplitudes,
    run_circuit,
)

CONTROLLED_FJ = "controlled_fj"
SINGLE_QUBIT_PRODUCT = "single_qubit_product"
PHASE_STYLES = (CONTROLLED_FJ, SINGLE_QUBIT_PRODUCT)

DEFAULT_LAMBDA = 0.921


@dataclass(frozen=True)
class PointerGrid:
    num_qubits: int = 6
    half_width: float = 3.0
    sigma: float = 0.4
    coupling: float = 0.106

    def __post_init__(self):
        if self.num_qubits < 1:
            raise DomainError("pointer register needs at least one qubit")
        if not self.half_width > 0:
            raise DomainError("half width d must be positive")
        if not self.sigma > 0:
            raise DomainError("sigma must be positive")
        if not self.coupling >= 0:
            raise DomainError("coupling g must be non-negative")
        if 6 * self.sigma > 2 * self.half_width:
            raise DomainError("Gaussian does not fit the grid: need 6*sigma <= 2*d")

    @property
    def size(self) -> int:
        return 1 << self.num_qubits

    @property
    def dx(self) -> float:
        return 2 * self.half_width / (self.size - 1)


def grid_points(grid: PointerGrid) -> np.ndarray:
    x = -grid.half_width + np.arange(grid.size) * grid.dx
    x[-1] = grid.half_width
    return x


def gaussian_amplitudes(grid: PointerGrid, shift: float = 0.0) -> np.ndarray:
    """Real, L2-normalised samples of ``exp(-(x - shift)^2 / (4 sigma^2))``."""
    x = grid_points(grid)
    e = -((x - shift) ** 2) / (4 * grid.sigma ** 2)
    # shift exponents so coarse grids cannot underflow to all zeros
    a = np.exp(e - e.max())
    return a / np.linalg.norm(a)


def discretize_gaussian(grid: PointerGrid, shift: float = 0.0) -> StateVector:
    return init_from_amplitudes(gaussian_amplitudes(grid, shift))


@dataclass(frozen=True)
class PhaseShiftSpec:
    """Momentum phase ``|p> -> exp(i * lam * f(p)) |p>`` with ``f(p) = -coupling * p``."""

    lam: float
    coupling: float
    style: str = SINGLE_QUBIT_PRODUCT

    def __post_init__(self):
        if self.style not in PHASE_STYLES:
            raise DomainError(f"unknown phase-shift style {self.style!r}")

    def phase(self, p):
        return -self.lam * self.coupling * np.asarray(p, dtype=np.float64)


def phase_shift_gates(spec: PhaseShiftSpec, register: Sequence[int], controls=()) -> list:
    """Gates realising the momentum phase on ``register`` (``register[0]`` LSB).

    ``controls`` are extra ``(qubit, polarity)`` conditions added to every gate,
    used to make the whole phase shift act on one polarisation branch.
    """
    register = list(register)
    m = len(register)
    if m == 0:
        raise DomainError("phase shift needs a non-empty register")
    controls = tuple(controls)
    ops = []
    if spec.style == SINGLE_QUBIT_PRODUCT:
        for j, q in enumerate(register):
            theta = float(spec.phase(1 << j))
            ops.append(GateOp(q, np.diag([1.0, np.exp(1j * theta)]), controls))
        return ops
    # F_j = diag(e^{i lam f(2j)}, e^{i lam f(2j+1)}) on register[0], with the
    # higher register qubits selecting j through their polarity pattern.
    for j in range(1 << (m - 1)):
        f0, f1 = spec.phase([2 * j, 2 * j + 1])
        pattern = tuple((register[i + 1], (j >> i) & 1) for i in range(m - 1))
        ops.append(GateOp(register[0], np.diag([np.exp(1j * f0), np.exp(1j * f1)]),
                          pattern + controls))
    return ops


def build_phase_shift(spec: PhaseShiftSpec, register: Sequence[int], controls=(),
                      num_qubits: Optional[int] = None) -> Circuit:
    register = list(register)
    if not register:
        raise DomainError("phase shift needs a non-empty register")
    if num_qubits is None:
        num_qubits = max(list(register) + [c for c, _ in controls]) + 1
    return Circuit(num_qubits, phase_shift_gates(spec, register, controls))


def translation_ops(spec: PhaseShiftSpec, register: Sequence[int], controls=()) -> list:
    """Inverse QFT, momentum phase, QFT.

    Only the phase shift carries ``controls``: on the uncontrolled branch the
    two transforms cancel.
    """
    register = tuple(register)
    return ([QftBlock(register, inverse=True)]
            + phase_shift_gates(spec, register, controls)
            + [QftBlock(register, inverse=False)])


def translate(state: StateVector, spec: PhaseShiftSpec, register: Sequence[int]) -> StateVector:
    circuit = Circuit(state.num_qubits, translation_ops(spec, register))
    return run_circuit(circuit, state)


# --------------------------------------------------------------------------
# lambda calibration

@dataclass(frozen=True)
class LambdaCalibration:
    grid: PointerGrid = field(default_factory=PointerGrid)
    sweep_lo: float = 0.85
    sweep_hi: float = 1.00
    sweep_step: float = 0.001
    style: str = SINGLE_QUBIT_PRODUCT

    def __post_init__(self):
        if not self.sweep_step > 0:
            raise DomainError("sweep step must be positive")
        if not self.sweep_lo < self.sweep_hi:
            raise DomainError("sweep range is empty")

    def lambdas(self) -> np.ndarray:
        count = int(math.floor((self.sweep_hi - self.sweep_lo) / self.sweep_step + 1e-9)) + 1
        return np.round(self.sweep_lo + self.sweep_step * np.arange(count), 12)


@dataclass(frozen=True)
class CalibrationResult:
    lambdas: np.ndarray
    fidelities: np.ndarray
    argmax_match: np.ndarray
    best_lambda: float
    best_fidelity: float
    interval: Optional[tuple]
    degenerate: bool


def peak_index(amps, tol: float = 1e-12) -> int:
    """Lowest index whose magnitude is within ``tol`` of the maximum.

    Makes the argmax stable for exactly symmetric profiles whose two central
    samples tie up to rounding.
    """
    mag = np.abs(np.asarray(amps))
    return int(np.flatnonzero(mag >= mag.max() - tol)[0])


def _longest_run(flags: np.ndarray) -> Optional[tuple]:
    best = None
    start = None
    for i, f in enumerate(list(flags) + [False]):
        if f and start is None:
            start = i
        elif not f and start is not None:
            if best is None or i - start > best[1] - best[0] + 1:
                best = (start, i - 1)
            start = None
    return best


def calibrate_lambda(cal: LambdaCalibration) -> CalibrationResult:
    """Sweep lambda and score how well one translation reproduces a shift by ``g``.

    For each lambda the translated ``discretize_gaussian(grid, 0)`` is compared
    with ``discretize_gaussian(grid, g)`` both by fidelity and by whether the
    peaks land on the same basis state. The best lambda maximises fidelity
    (smallest lambda on ties within 1e-12); the interval is the longest
    contiguous run of lambdas whose peaks match.
    """
    grid = cal.grid
    register = list(range(grid.num_qubits))
    psi0 = discretize_gaussian(grid, 0.0)
    target = discretize_gaussian(grid, grid.coupling)
    target_peak = peak_index(target.amps)
    lams = cal.lambdas()
    fids = np.empty(lams.size)
    match = np.zeros(lams.size, dtype=bool)
    for i, lam in enumerate(lams):
        out = translate(psi0, PhaseShiftSpec(float(lam), grid.coupling, cal.style), register)
        fids[i] = fidelity(out, target)
        match[i] = peak_index(out.amps) == target_peak
    top = fids.max()
    best = int(np.flatnonzero(fids >= top - 1e-12)[0])
    run = _longest_run(match)
    interval = None if run is None else (float(lams[run[0]]), float(lams[run[1]]))
    degenerate = bool(np.ptp(fids) <= 1e-12)
    return CalibrationResult(lams, fids, match, float(lams[best]), float(fids[best]),
                             interval, degenerate)
