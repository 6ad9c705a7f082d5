"""Dense statevector engine.

Qubit ``k`` is bit ``k`` of the basis index (qubit 0 is least significant).
Internally the amplitude array is viewed as a rank-``q`` tensor of shape
``(2,) * q`` in C order, so qubit ``k`` lives on axis ``q - 1 - k``.

States returned by the public functions are immutable; gates are applied to
a private copy through strided views, never by materialising a full
``2**q x 2**q`` matrix.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from typing import Mapping, Sequence, Union

import numpy as np

from photonsim.errors import DomainError, PostselectionError

MAX_QUBITS = 24  # protective layouts reach pointer + 1 + steps qubits
UNITARY_TOL = 1e-12
DENSE_QFT_MAX = 8


@dataclass(frozen=True, eq=False)
class StateVector:
    num_qubits: int
    amps: np.ndarray

    def __post_init__(self):
        amps = np.asarray(self.amps, dtype=np.complex128)
        if amps.shape != (1 << self.num_qubits,):
            raise DomainError(
                f"expected {1 << self.num_qubits} amplitudes, got shape {amps.shape}")
        if not np.all(np.isfinite(amps)):
            raise DomainError("amplitudes must be finite")
        if amps.flags.writeable:
            amps = amps.copy()
            amps.flags.writeable = False
        object.__setattr__(self, "amps", amps)

    @property
    def dim(self) -> int:
        return self.amps.shape[0]

    def norm(self) -> float:
        return float(np.linalg.norm(self.amps))


@dataclass(frozen=True, eq=False)
class GateOp:
    """A 2x2 unitary on ``target`` conditioned on ``controls``.

    ``controls`` holds ``(qubit, polarity)`` pairs; the gate fires only on
    basis states where every listed qubit equals its polarity.
    """

    target: int
    matrix: np.ndarray
    controls: tuple = ()

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=np.complex128)
        if m.shape != (2, 2):
            raise DomainError(f"gate matrix must be 2x2, got {m.shape}")
        if np.max(np.abs(m.conj().T @ m - np.eye(2))) > UNITARY_TOL:
            raise DomainError("gate matrix is not unitary")
        m = m.copy()
        m.flags.writeable = False
        object.__setattr__(self, "matrix", m)
        controls = tuple((int(c), int(b)) for c, b in self.controls)
        qubits = [c for c, _ in controls]
        if len(set(qubits)) != len(qubits):
            raise DomainError("control qubits must be distinct")
        if self.target in qubits:
            raise DomainError("target cannot also be a control")
        if any(b not in (0, 1) for _, b in controls):
            raise DomainError("control polarity must be 0 or 1")
        object.__setattr__(self, "controls", controls)

    @property
    def qubits(self) -> tuple:
        return (self.target,) + tuple(c for c, _ in self.controls)


@dataclass(frozen=True)
class QftBlock:
    """Quantum Fourier transform over ``register`` (``register[0]`` is the LSB)."""

    register: tuple
    inverse: bool = False

    def __post_init__(self):
        reg = tuple(int(r) for r in self.register)
        if len(set(reg)) != len(reg):
            raise DomainError("QFT register qubits must be distinct")
        object.__setattr__(self, "register", reg)

    @property
    def qubits(self) -> tuple:
        return self.register


@dataclass(frozen=True, eq=False)
class PrepareState:
    """Load real, normalised ``amplitudes`` into a register holding ``|0...0>``.

    Realised as the Householder reflection that maps ``|0>`` onto the target
    vector, so the op is a genuine unitary on the register.
    """

    register: tuple
    amplitudes: np.ndarray

    def __post_init__(self):
        reg = tuple(int(r) for r in self.register)
        if len(set(reg)) != len(reg):
            raise DomainError("register qubits must be distinct")
        a = np.asarray(self.amplitudes, dtype=np.float64)
        if a.shape != (1 << len(reg),):
            raise DomainError("amplitude count does not match register size")
        nrm = np.linalg.norm(a)
        if nrm == 0:
            raise DomainError("cannot prepare the zero vector")
        a = a / nrm
        a.flags.writeable = False
        object.__setattr__(self, "register", reg)
        object.__setattr__(self, "amplitudes", a)

    @property
    def qubits(self) -> tuple:
        return self.register

    def unitary(self) -> np.ndarray:
        a = self.amplitudes
        e0 = np.zeros_like(a)
        e0[0] = 1.0
        w = e0 - a
        nw = np.linalg.norm(w)
        if nw < 1e-15:
            return np.eye(a.size, dtype=np.complex128)
        w /= nw
        return (np.eye(a.size) - 2.0 * np.outer(w, w)).astype(np.complex128)


Op = Union[GateOp, QftBlock, PrepareState]


@dataclass
class Circuit:
    num_qubits: int
    ops: list = field(default_factory=list)

    def __post_init__(self):
        if self.num_qubits < 1:
            raise DomainError("a circuit needs at least one qubit")
        for op in self.ops:
            self._check(op)

    def _check(self, op):
        for q in op.qubits:
            if not 0 <= q < self.num_qubits:
                raise DomainError(f"qubit {q} out of range for {self.num_qubits} qubits")

    def append(self, op: Op) -> "Circuit":
        self._check(op)
        self.ops.append(op)
        return self

    def extend(self, ops) -> "Circuit":
        for op in ops:
            self.append(op)
        return self

    def __len__(self):
        return len(self.ops)


# --------------------------------------------------------------------------
# construction

def init_basis(num_qubits: int, basis_index: int) -> StateVector:
    _check_num_qubits(num_qubits)
    if not 0 <= basis_index < (1 << num_qubits):
        raise DomainError(f"basis index {basis_index} out of range for {num_qubits} qubits")
    amps = np.zeros(1 << num_qubits, dtype=np.complex128)
    amps[basis_index] = 1.0
    return StateVector(num_qubits, amps)


def init_from_amplitudes(amps) -> StateVector:
    a = np.asarray(amps, dtype=np.complex128).ravel()
    n = a.size
    if n == 0 or n & (n - 1):
        raise DomainError(f"amplitude count {n} is not a power of two")
    nrm = np.linalg.norm(a)
    if not np.isfinite(nrm) or nrm == 0:
        raise DomainError("cannot normalise a zero or non-finite vector")
    num_qubits = n.bit_length() - 1
    _check_num_qubits(num_qubits)
    return StateVector(num_qubits, a / nrm)


def _check_num_qubits(num_qubits):
    if not 1 <= num_qubits <= MAX_QUBITS:
        raise DomainError(f"num_qubits must be in [1, {MAX_QUBITS}], got {num_qubits}")


# --------------------------------------------------------------------------
# in-place kernels on the (2,)*q tensor view

def _axis(num_qubits, qubit):
    return num_qubits - 1 - qubit


def _gate_inplace(psi: np.ndarray, op: GateOp) -> None:
    q = psi.ndim
    idx = [slice(None)] * q
    for c, b in op.controls:
        idx[_axis(q, c)] = b
    t = _axis(q, op.target)
    i0 = list(idx)
    i1 = list(idx)
    i0[t] = 0
    i1[t] = 1
    i0, i1 = tuple(i0), tuple(i1)
    m = op.matrix
    if m[0, 1] == 0 and m[1, 0] == 0:
        if m[0, 0] != 1:
            psi[i0] *= m[0, 0]
        if m[1, 1] != 1:
            psi[i1] *= m[1, 1]
        return
    a0 = psi[i0].copy()
    a1 = psi[i1]
    psi[i0] = m[0, 0] * a0 + m[0, 1] * a1
    psi[i1] = m[1, 0] * a0 + m[1, 1] * a1


def _apply_register_matrix(psi: np.ndarray, register: Sequence[int], u: np.ndarray) -> np.ndarray:
    """Apply ``u`` (indexed with ``register[0]`` as LSB) to the register axes."""
    q = psi.ndim
    m = len(register)
    # register[m-1] (the register MSB) goes to axis 0 so C-order flattening
    # of the leading m axes reproduces the register index.
    axes = [_axis(q, r) for r in reversed(register)]
    moved = np.moveaxis(psi, axes, list(range(m)))
    shape = moved.shape
    out = u @ moved.reshape(1 << m, -1)
    return np.moveaxis(out.reshape(shape), list(range(m)), axes)


def qft_matrix(size: int, inverse: bool = False) -> np.ndarray:
    """DFT matrix ``F[k, j] = exp(+2 pi i j k / N) / sqrt(N)`` (conjugated if inverse)."""
    k = np.arange(size)
    sign = -1.0 if inverse else 1.0
    return np.exp(sign * 2j * np.pi * np.outer(k, k) / size) / np.sqrt(size)


def qft_gates(register: Sequence[int], inverse: bool = False) -> list:
    """QFT as a Hadamard / controlled-phase ladder followed by bit-reversal swaps."""
    register = list(register)
    m = len(register)
    h = np.array([[1, 1], [1, -1]]) / np.sqrt(2)
    x = np.array([[0, 1], [1, 0]])
    ops = []
    for i in range(m - 1, -1, -1):
        ops.append(GateOp(register[i], h))
        for l in range(i - 1, -1, -1):
            phase = np.exp(2j * np.pi / (1 << (i - l + 1)))
            ops.append(GateOp(register[i], np.diag([1, phase]), ((register[l], 1),)))
    for i in range(m // 2):
        a, b = register[i], register[m - 1 - i]
        ops += [GateOp(b, x, ((a, 1),)), GateOp(a, x, ((b, 1),)), GateOp(b, x, ((a, 1),))]
    if inverse:
        ops = [GateOp(o.target, o.matrix.conj().T, o.controls) for o in reversed(ops)]
    return ops


def _apply_op_inplace(psi: np.ndarray, op: Op) -> np.ndarray:
    if isinstance(op, GateOp):
        _gate_inplace(psi, op)
        return psi
    if isinstance(op, QftBlock):
        if len(op.register) <= DENSE_QFT_MAX:
            return _apply_register_matrix(psi, op.register, qft_matrix(1 << len(op.register), op.inverse))
        for g in qft_gates(op.register, op.inverse):
            _gate_inplace(psi, g)
        return psi
    if isinstance(op, PrepareState):
        return _apply_register_matrix(psi, op.register, op.unitary())
    raise TypeError(f"unsupported op {op!r}")


def _check_qubits(state: StateVector, qubits):
    for q in qubits:
        if not 0 <= q < state.num_qubits:
            raise DomainError(f"qubit {q} out of range for {state.num_qubits} qubits")


# --------------------------------------------------------------------------
# public operations

def apply_gate(state: StateVector, op: GateOp) -> StateVector:
    _check_qubits(state, op.qubits)
    psi = state.amps.copy().reshape((2,) * state.num_qubits)
    _gate_inplace(psi, op)
    return StateVector(state.num_qubits, psi.reshape(-1))


def apply_qft(state: StateVector, register: Sequence[int], inverse: bool = False) -> StateVector:
    block = QftBlock(tuple(register), inverse)
    _check_qubits(state, block.register)
    psi = state.amps.copy().reshape((2,) * state.num_qubits)
    psi = _apply_op_inplace(psi, block)
    return StateVector(state.num_qubits, np.ascontiguousarray(psi).reshape(-1))


def run_circuit(circuit: Circuit, state: StateVector | None = None) -> StateVector:
    """Evolve ``state`` (default ``|0...0>``) through every op of ``circuit``."""
    if state is None:
        state = init_basis(circuit.num_qubits, 0)
    if state.num_qubits != circuit.num_qubits:
        raise DomainError("state and circuit qubit counts differ")
    psi = state.amps.copy().reshape((2,) * state.num_qubits)
    for op in circuit.ops:
        psi = _apply_op_inplace(psi, op)
    return StateVector(state.num_qubits, np.ascontiguousarray(psi).reshape(-1))


def _constraint_mask(state: StateVector, constraint: Mapping[int, int]) -> tuple:
    q = state.num_qubits
    _check_qubits(state, constraint)
    idx = [slice(None)] * q
    for qubit, bit in constraint.items():
        if bit not in (0, 1):
            raise DomainError(f"constraint bit for qubit {qubit} must be 0 or 1")
        idx[_axis(q, qubit)] = int(bit)
    return tuple(idx)


def exact_probability(state: StateVector, constraint: Mapping[int, int]) -> float:
    psi = state.amps.reshape((2,) * state.num_qubits)
    sub = psi[_constraint_mask(state, constraint)]
    return float(np.sum(sub.real ** 2 + sub.imag ** 2))


def postselect(state: StateVector, constraint: Mapping[int, int]) -> tuple:
    """Project onto ``constraint`` and renormalise.

    Returns ``(post_state, probability)`` where ``probability`` is the weight
    of the constraint before projection.
    """
    p = exact_probability(state, constraint)
    if p <= 0.0:
        raise PostselectionError(f"constraint {dict(constraint)} has zero probability")
    psi = state.amps.reshape((2,) * state.num_qubits)
    out = np.zeros_like(psi)
    idx = _constraint_mask(state, constraint)
    out[idx] = psi[idx] / np.sqrt(p)
    return StateVector(state.num_qubits, out.reshape(-1)), p


def register_amplitudes(state: StateVector, register: Sequence[int], fixed: Mapping[int, int]) -> np.ndarray:
    """Amplitudes over ``register`` (``register[0]`` LSB) with all other qubits pinned.

    Every qubit outside ``register`` must appear in ``fixed``.
    """
    register = list(register)
    others = set(range(state.num_qubits)) - set(register)
    if set(fixed) != others:
        raise DomainError("fixed must pin exactly the qubits outside the register")
    q = state.num_qubits
    psi = state.amps.reshape((2,) * q)
    sub = psi[_constraint_mask(state, fixed)]
    # remaining axes are the register qubits in descending qubit order
    remaining = sorted(register, reverse=True)
    order = [remaining.index(r) for r in reversed(register)]
    return np.ascontiguousarray(np.transpose(sub, order)).reshape(-1)


def marginal_probabilities(state: StateVector, measured: Sequence[int]) -> np.ndarray:
    """Outcome distribution over ``measured``; bit ``i`` of the outcome index is ``measured[i]``."""
    measured = list(measured)
    if len(set(measured)) != len(measured):
        raise DomainError("measured qubits must be distinct")
    _check_qubits(state, measured)
    q = state.num_qubits
    probs = (state.amps.real ** 2 + state.amps.imag ** 2).reshape((2,) * q)
    keep = [_axis(q, m) for m in reversed(measured)]
    drop = tuple(a for a in range(q) if a not in keep)
    marg = probs.sum(axis=drop) if drop else probs
    # after summing, surviving axes keep their relative order
    surviving = sorted(keep)
    marg = np.transpose(marg, [surviving.index(a) for a in keep])
    return marg.reshape(-1)


def sample_indices(state: StateVector, measured: Sequence[int], shots: int, seed: int) -> np.ndarray:
    """Draw ``shots`` outcome indices over ``measured``.

    Uses a Philox counter-based stream keyed by ``seed``: shot ``i`` consumes
    counter position ``i``, so a run with fewer shots is a prefix of a longer
    one and results never depend on evaluation order.
    """
    if shots < 1:
        raise DomainError("shots must be >= 1")
    probs = marginal_probabilities(state, measured)
    cdf = np.cumsum(probs)
    cdf /= cdf[-1]
    u = np.random.Generator(np.random.Philox(key=int(seed))).random(int(shots))
    out = np.searchsorted(cdf, u, side="right")
    return np.minimum(out, probs.size - 1)


def sample_shots(state: StateVector, measured: Sequence[int], shots: int, seed: int) -> Counter:
    """Counter of bitstrings; character ``i`` is the bit of ``measured[i]``."""
    m = len(measured)
    idx = sample_indices(state, measured, shots, seed)
    values, counts = np.unique(idx, return_counts=True)
    return Counter({
        "".join(str((int(v) >> i) & 1) for i in range(m)): int(c)
        for v, c in zip(values, counts)
    })


def fidelity(a: StateVector, b: StateVector) -> float:
    if a.num_qubits != b.num_qubits:
        raise DomainError("fidelity needs states of equal size")
    return float(min(1.0, abs(np.vdot(a.amps, b.amps)) ** 2))
