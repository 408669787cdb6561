"""Dense statevector and superoperator simulator.

Serves both as the execution backend for sampling and as the brute-force
oracle for decomposition verification.  Gate application uses strided kernels
over the amplitude array; full matrices are built only inside the
superoperator routines.

Vectorization convention: column-major, vec(rho)[c*D + r] = rho[r, c], so a
unitary channel U has superoperator matrix conj(U) (x) U and the map
rho -> M rho N has matrix N^T (x) M.

Supported sizes: statevectors up to 20 qubits, superoperators up to 6 qubits
(4096-dimensional matrices).  Everything is double precision.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

MAX_STATE_QUBITS = 20
MAX_SUPEROP_QUBITS = 6
NORM_TOL = 1e-10

_INV_SQRT2 = 1.0 / math.sqrt(2.0)

GATE_MATRICES = {
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "H": np.array([[1, 1], [1, -1]], dtype=complex) * _INV_SQRT2,
    "S": np.diag([1, 1j]).astype(complex),
    "SDG": np.diag([1, -1j]).astype(complex),
    "Z": np.diag([1, -1]).astype(complex),
}


def rotation_matrix(kind: str, angle: float) -> np.ndarray:
    c, s = math.cos(angle / 2), math.sin(angle / 2)
    if kind == "RX":
        return np.array([[c, -1j * s], [-1j * s, c]], dtype=complex)
    if kind == "RY":
        return np.array([[c, -s], [s, c]], dtype=complex)
    if kind == "RZ":
        return np.diag([np.exp(-1j * angle / 2), np.exp(1j * angle / 2)])
    raise ValueError(f"not a rotation kind: {kind}")


@dataclass
class StateVector:
    """Complex amplitudes over 2^n basis states; qubit 0 is the MSB."""

    amplitudes: np.ndarray
    num_qubits: int

    @staticmethod
    def zero(n: int) -> "StateVector":
        if n > MAX_STATE_QUBITS:
            raise ValueError(f"statevector limited to {MAX_STATE_QUBITS} qubits, got {n}")
        amps = np.zeros(2**n, dtype=complex)
        amps[0] = 1.0
        return StateVector(amps, n)

    @staticmethod
    def from_amplitudes(amps) -> "StateVector":
        amps = np.asarray(amps, dtype=complex)
        n = int(round(math.log2(amps.size)))
        if 2**n != amps.size:
            raise ValueError("amplitude array length must be a power of two")
        return StateVector(amps.copy(), n)

    def copy(self) -> "StateVector":
        return StateVector(self.amplitudes.copy(), self.num_qubits)

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def probabilities(self) -> np.ndarray:
        return np.abs(self.amplitudes) ** 2


@dataclass(frozen=True)
class MeasurementOutcome:
    """A measured bitstring over a qubit subset together with its probability."""

    bits: str
    probability: float


@dataclass
class Superoperator:
    """Dense matrix acting on column-major vectorized density matrices."""

    matrix: np.ndarray = field(repr=False)
    num_qubits: int

    @property
    def dim(self) -> int:
        return 2**self.num_qubits

    def apply_to_density(self, rho: np.ndarray) -> np.ndarray:
        vec = rho.reshape(-1, order="F")
        out = self.matrix @ vec
        return out.reshape(rho.shape, order="F")

    def is_trace_preserving(self, tol: float = NORM_TOL) -> bool:
        # tr(S(rho)) = tr(rho) for all rho  <=>  vec(I)^dagger S = vec(I)^dagger
        d = self.dim
        vec_id = np.eye(d, dtype=complex).reshape(-1, order="F")
        return bool(np.max(np.abs(vec_id @ self.matrix - vec_id)) < tol)


# ---------------------------------------------------------------------------
# Strided gate kernels
# ---------------------------------------------------------------------------

def _apply_single(amps: np.ndarray, n: int, matrix: np.ndarray, q: int) -> np.ndarray:
    psi = amps.reshape((2,) * n)
    out = np.tensordot(matrix, psi, axes=([1], [q]))
    return np.moveaxis(out, 0, q).reshape(-1)


def _apply_cnot(amps: np.ndarray, n: int, control: int, target: int) -> np.ndarray:
    psi = amps.reshape((2,) * n).copy()
    sel = [slice(None)] * n
    sel[control] = 1
    block = psi[tuple(sel)]
    t_axis = target - (1 if target > control else 0)
    psi[tuple(sel)] = np.flip(block, axis=t_axis)
    return psi.reshape(-1)


def _apply_phase_on_ones(amps: np.ndarray, n: int, qubits, phase: complex) -> np.ndarray:
    psi = amps.reshape((2,) * n).copy()
    sel = [slice(None)] * n
    for q in qubits:
        sel[q] = 1
    psi[tuple(sel)] *= phase
    return psi.reshape(-1)


def apply_gate(state: StateVector, gate) -> StateVector:
    """Apply one circuit gate in place and return the state."""
    n = state.num_qubits
    for q in gate.qubits:
        if not 0 <= q < n:
            raise ValueError(f"gate qubit {q} out of range for {n}-qubit state")
    kind = gate.kind
    if kind in ("RX", "RY", "RZ"):
        state.amplitudes = _apply_single(state.amplitudes, n, rotation_matrix(kind, gate.angle), gate.qubits[0])
    elif kind in GATE_MATRICES:
        state.amplitudes = _apply_single(state.amplitudes, n, GATE_MATRICES[kind], gate.qubits[0])
    elif kind == "CNOT":
        state.amplitudes = _apply_cnot(state.amplitudes, n, gate.qubits[0], gate.qubits[1])
    elif kind in ("CZ", "MCZ"):
        state.amplitudes = _apply_phase_on_ones(state.amplitudes, n, gate.qubits, -1.0)
    elif kind == "MCP":
        state.amplitudes = _apply_phase_on_ones(state.amplitudes, n, gate.qubits, np.exp(1j * gate.angle))
    else:
        raise ValueError(f"unknown gate kind {kind!r}")
    return state


def run(circuit, initial: StateVector | None = None) -> StateVector:
    """Apply the circuit's gates in order to a copy of the initial state."""
    if initial is None:
        state = StateVector.zero(circuit.num_qubits)
    else:
        if 2**circuit.num_qubits != initial.amplitudes.size:
            raise ValueError("dimension mismatch between circuit and initial state")
        state = initial.copy()
    for gate in circuit.gates:
        apply_gate(state, gate)
    if abs(state.norm() - 1.0) > NORM_TOL:
        raise RuntimeError(f"state norm drifted to {state.norm()}")
    return state


def apply_diagonal(state: StateVector, qubits, local_diag: np.ndarray) -> StateVector:
    """Apply a diagonal operator given over a qubit subset (subset-local indexing)."""
    n = state.num_qubits
    k = len(qubits)
    psi = state.amplitudes.reshape((2,) * n)
    psi = np.moveaxis(psi, qubits, range(k))
    psi = psi.reshape(2**k, -1) * local_diag[:, None]
    psi = np.moveaxis(psi.reshape((2,) * n), range(k), qubits)
    state.amplitudes = np.ascontiguousarray(psi).reshape(-1)
    return state


# ---------------------------------------------------------------------------
# Expectation values, sampling, projection
# ---------------------------------------------------------------------------

def expval(state: StateVector, obs) -> float:
    """Sum_s |<s|psi>|^2 f(s) for a diagonal observable."""
    if obs.values.size != state.amplitudes.size:
        raise ValueError("dimension mismatch between state and observable")
    return float(np.real(state.probabilities() @ obs.values))


def sample_basis_indices(state: StateVector, shots: int, rng: np.random.Generator) -> np.ndarray:
    probs = state.probabilities()
    probs = probs / probs.sum()
    return rng.choice(probs.size, size=shots, p=probs)


def sample_bitstring(state: StateVector, rng: np.random.Generator) -> str:
    """Draw one bitstring with Born probability |<s|psi>|^2."""
    idx = int(sample_basis_indices(state, 1, rng)[0])
    return format(idx, f"0{state.num_qubits}b")


def _subset_probabilities(state: StateVector, qubits) -> np.ndarray:
    """Marginal outcome probabilities over a qubit subset (subset-local indexing)."""
    n = state.num_qubits
    k = len(qubits)
    psi = state.amplitudes.reshape((2,) * n)
    psi = np.moveaxis(psi, qubits, range(k))
    return np.abs(psi.reshape(2**k, -1)) ** 2 @ np.ones(2**(n - k)) if n > k else np.abs(psi.reshape(-1)) ** 2


def project(state: StateVector, qubits, outcome: str | int | None = None,
            rng: np.random.Generator | None = None) -> tuple[StateVector, float]:
    """Project onto a computational-basis outcome of the given qubits.

    Returns the renormalized post-measurement state and the outcome
    probability.  When ``rng`` is given the outcome is sampled from the Born
    distribution instead of being taken as input.  Projecting onto a
    zero-probability outcome is an error.
    """
    qubits = list(qubits)
    k = len(qubits)
    probs = _subset_probabilities(state, qubits)
    if rng is not None:
        outcome_idx = int(rng.choice(probs.size, p=probs / probs.sum()))
    elif outcome is None:
        raise ValueError("either an outcome or an rng must be given")
    else:
        outcome_idx = int(outcome, 2) if isinstance(outcome, str) else int(outcome)
    p = float(probs[outcome_idx])
    if p < 1e-14:
        raise ValueError(f"projection onto zero-probability outcome {outcome_idx:0{k}b}")
    n = state.num_qubits
    psi = state.amplitudes.reshape((2,) * n).copy()
    psi = np.moveaxis(psi, qubits, range(k))
    flat = psi.reshape(2**k, -1)
    keep = flat[outcome_idx].copy()
    flat[:] = 0.0
    flat[outcome_idx] = keep / math.sqrt(p)
    psi = np.moveaxis(flat.reshape((2,) * n), range(k), qubits)
    return StateVector(np.ascontiguousarray(psi).reshape(-1), n), p


def measure(state: StateVector, qubits, rng: np.random.Generator) -> tuple[MeasurementOutcome, StateVector]:
    """Sample a computational-basis measurement on a qubit subset."""
    qubits = list(qubits)
    probs = _subset_probabilities(state, qubits)
    idx = int(rng.choice(probs.size, p=probs / probs.sum()))
    post, p = project(state, qubits, idx)
    return MeasurementOutcome(format(idx, f"0{len(qubits)}b"), p), post


# ---------------------------------------------------------------------------
# Superoperators
# ---------------------------------------------------------------------------

def _check_superop_size(n: int):
    if n > MAX_SUPEROP_QUBITS:
        raise ValueError(f"superoperators limited to {MAX_SUPEROP_QUBITS} qubits, got {n}")


def superop_of_unitary(unitary: np.ndarray, strict: bool = True) -> Superoperator:
    """Matrix of rho -> U rho U^dagger under column-major vectorization."""
    unitary = np.asarray(unitary, dtype=complex)
    d = unitary.shape[0]
    n = int(round(math.log2(d)))
    if unitary.shape != (d, d) or 2**n != d:
        raise ValueError("unitary must be square with power-of-two dimension")
    _check_superop_size(n)
    if strict:
        err = np.max(np.abs(unitary.conj().T @ unitary - np.eye(d)))
        if err > NORM_TOL:
            raise ValueError(f"matrix is not unitary (deviation {err:.2e})")
    return Superoperator(np.kron(unitary.conj(), unitary), n)


def superop_of_kraus_like(terms, n: int) -> Superoperator:
    """Superoperator of rho -> sum_i w_i M_i rho M_i^dagger for diagonal M_i.

    ``terms`` is an iterable of (weight, diagonal) pairs where each diagonal is
    a length-2^n complex vector.  Weights may be negative (signed maps).
    """
    _check_superop_size(n)
    d = 2**n
    total = np.zeros((d * d, d * d), dtype=complex)
    for weight, diag in terms:
        m = np.diag(np.asarray(diag, dtype=complex))
        total += weight * np.kron(m.conj(), m)
    return Superoperator(total, n)


def superop_of_local_operation(op) -> Superoperator:
    """Superoperator of a decomposition local operation.

    Dispatches on the operation's signed-diagonal expansion: unitary variants
    give conj(D) (x) D; the Z-mixture averages all 2^n Z-layer channels; the
    signed projector sums xi_l P_l . P_l with xi = -1 only at the all-ones
    outcome; the rank-one projector keeps the single all-ones term.
    """
    return superop_of_kraus_like(op.signed_diagonal_terms(), op.num_qubits)


def pair_superop(superop_a: Superoperator, superop_b: Superoperator) -> Superoperator:
    """Superoperator of the product channel F_A (x) F_B on the joint register.

    Partition A holds the leading (most significant) qubits.  Because
    vectorization interleaves row and column indices the result is a
    transposed reshuffle of the plain Kronecker product.
    """
    da, db = superop_a.dim, superop_b.dim
    n = superop_a.num_qubits + superop_b.num_qubits
    _check_superop_size(n)
    sa = superop_a.matrix.reshape(da, da, da, da)  # (col, row, col', row')
    sb = superop_b.matrix.reshape(db, db, db, db)
    t = np.einsum("aceg,bdfh->abcdefgh", sa, sb, optimize=True)
    d = da * db
    return Superoperator(t.reshape(d * d, d * d), n)


def mcp_diagonal(n: int, theta: float) -> np.ndarray:
    d = np.ones(2**n, dtype=complex)
    d[-1] = np.exp(1j * theta)
    return d


def mcz_unitary(n: int) -> np.ndarray:
    d = np.ones(2**n)
    d[-1] = -1.0
    return np.diag(d).astype(complex)


def zlayer_diagonal(n: int, mask: int) -> np.ndarray:
    """Diagonal of the Z-layer picked by a bitmask over local qubits (bit 0 = qubit 0 = MSB)."""
    d = np.ones(2**n, dtype=complex)
    for q in range(n):
        if (mask >> q) & 1:
            bit = 1 << (n - 1 - q)
            idx = np.arange(2**n)
            d = np.where(idx & bit, -d, d)
    return d
