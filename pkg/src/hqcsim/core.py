"""Dense statevector engine: states, single-qubit and CZ unitaries, Bloch-basis
projective measurement with seedable randomness.

Conventions used throughout the package:

- Endianness: qubit ``j`` addresses bit ``j`` of the basis index, with qubit 0
  the least significant bit, i.e. basis index ``i = sum_j b_j * 2**j``.
- Global phase is never normalised away; states are compared with `fidelity`.
- Every public operation returns a fresh, normalised StateVector; the input is
  never mutated.
"""
from __future__ import annotations

from dataclasses import dataclass
from math import cos, sin, sqrt

import numpy as np

__all__ = [
    "BlochVector",
    "MeasurementSpec",
    "RandomSource",
    "StateVector",
    "apply_cz",
    "apply_named",
    "apply_single_qubit",
    "fidelity",
    "make_basis_state",
    "measure",
    "measurement_projectors",
]

_MIN_PROBABILITY = 1e-14  # below this a measurement branch is impossible

_X = np.array([[0, 1], [1, 0]], dtype=complex)
_Z = np.array([[1, 0], [0, -1]], dtype=complex)
_H = np.array([[1, 1], [1, -1]], dtype=complex) / sqrt(2)


@dataclass(frozen=True)
class BlochVector:
    """Measurement/rotation direction on the Bloch sphere, in radians."""

    theta: float
    phi: float

    def components(self) -> tuple[float, float, float]:
        """Cartesian unit vector (sin t cos p, sin t sin p, cos t)."""
        st = sin(self.theta)
        return (st * cos(self.phi), st * sin(self.phi), cos(self.theta))


@dataclass(frozen=True)
class MeasurementSpec:
    """A projective measurement of one qubit along a Bloch direction."""

    target: int
    basis: BlochVector


class RandomSource:
    """Counter-based random stream keyed by (seed, stream).

    Uses the Philox bit generator, so identical (seed, stream) pairs produce
    identical draw sequences regardless of platform or of how many other
    streams were consumed: independent shots can share a seed and differ only
    in the stream index.
    """

    def __init__(self, seed: int, stream: int = 0):
        if seed < 0 or stream < 0:
            raise ValueError("seed and stream must be non-negative")
        self.seed = seed
        self.stream = stream
        self._gen = np.random.Generator(np.random.Philox(key=[seed, stream]))

    def random(self) -> float:
        """Uniform draw in [0, 1)."""
        return float(self._gen.random())

    def bit(self) -> int:
        return int(self._gen.integers(0, 2))

    def sample_index(self, probabilities: np.ndarray) -> int:
        """Draw an index from a probability vector using a single uniform."""
        cumulative = np.cumsum(probabilities)
        u = self.random() * cumulative[-1]
        return int(np.searchsorted(cumulative, u, side="right"))


@dataclass
class StateVector:
    """Normalised amplitudes over the 2**num_qubits computational basis."""

    num_qubits: int
    amplitudes: np.ndarray

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def probabilities(self) -> np.ndarray:
        return np.abs(self.amplitudes) ** 2

    def copy(self) -> "StateVector":
        return StateVector(self.num_qubits, self.amplitudes.copy())


def make_basis_state(num_qubits: int, bits: list[int] | tuple[int, ...]) -> StateVector:
    """Computational basis state with bits[j] on qubit j."""
    if len(bits) != num_qubits:
        raise ValueError(f"expected {num_qubits} bits, got {len(bits)}")
    index = 0
    for q, b in enumerate(bits):
        if b not in (0, 1):
            raise ValueError(f"bit {q} must be 0 or 1, got {b}")
        index |= b << q
    amps = np.zeros(2**num_qubits, dtype=complex)
    amps[index] = 1.0
    return StateVector(num_qubits, amps)


def _check_qubit(state: StateVector, q: int) -> None:
    if not 0 <= q < state.num_qubits:
        raise ValueError(f"qubit {q} out of range for {state.num_qubits}-qubit state")


def _apply_matrix(state: StateVector, q: int, matrix: np.ndarray) -> StateVector:
    # numpy's reshape puts the highest qubit on axis 0, so qubit q lives on
    # axis (n - 1 - q) under the little-endian index convention.
    n = state.num_qubits
    axis = n - 1 - q
    tensor = state.amplitudes.reshape((2,) * n)
    tensor = np.moveaxis(tensor, axis, 0)
    tensor = np.tensordot(matrix, tensor, axes=([1], [0]))
    tensor = np.moveaxis(tensor, 0, axis)
    return StateVector(n, np.ascontiguousarray(tensor).reshape(-1))


def axis_angle_matrix(axis: BlochVector, alpha: float) -> np.ndarray:
    """2x2 unitary exp(-i alpha (r.sigma)/2) for the given rotation axis."""
    rx, ry, rz = axis.components()
    r_sigma = np.array([[rz, rx - 1j * ry], [rx + 1j * ry, -rz]], dtype=complex)
    return cos(alpha / 2) * np.eye(2) - 1j * sin(alpha / 2) * r_sigma


def apply_single_qubit(state: StateVector, q: int, axis: BlochVector, alpha: float) -> StateVector:
    """Rotate qubit q by angle alpha around the given Bloch axis."""
    _check_qubit(state, q)
    return _apply_matrix(state, q, axis_angle_matrix(axis, alpha))


def rz_matrix(phi: float) -> np.ndarray:
    return np.array([[np.exp(-0.5j * phi), 0], [0, np.exp(0.5j * phi)]], dtype=complex)


def apply_named(state: StateVector, q: int, gate: str, phi: float = 0.0) -> StateVector:
    """Apply an exact named gate: X, Z, H, or RZ(phi).

    The named path uses the literal matrices (bit-exact Pauli action), not the
    axis-angle exponential.
    """
    _check_qubit(state, q)
    if gate == "X":
        matrix = _X
    elif gate == "Z":
        matrix = _Z
    elif gate == "H":
        matrix = _H
    elif gate == "RZ":
        matrix = rz_matrix(phi)
    else:
        raise ValueError(f"unknown named gate {gate!r}")
    return _apply_matrix(state, q, matrix)


def apply_cz(state: StateVector, a: int, b: int) -> StateVector:
    """Controlled-Z between qubits a and b (symmetric)."""
    _check_qubit(state, a)
    _check_qubit(state, b)
    if a == b:
        raise ValueError("CZ needs two distinct qubits")
    indices = np.arange(state.amplitudes.size)
    both_one = ((indices >> a) & 1) & ((indices >> b) & 1)
    amps = state.amplitudes.copy()
    amps[both_one == 1] *= -1
    return StateVector(state.num_qubits, amps)


def basis_kets(basis: BlochVector) -> tuple[np.ndarray, np.ndarray]:
    """Outcome kets (up, down) for a Bloch-direction measurement.

    up   = cos(t/2)|0> + e^{ip} sin(t/2)|1>       (outcome 0)
    down = -sin(t/2)|0> + e^{ip} cos(t/2)|1>      (outcome 1)
    """
    half = basis.theta / 2
    phase = np.exp(1j * basis.phi)
    up = np.array([cos(half), phase * sin(half)], dtype=complex)
    down = np.array([-sin(half), phase * cos(half)], dtype=complex)
    return up, down


def measurement_projectors(spec: MeasurementSpec) -> tuple[np.ndarray, np.ndarray]:
    """The 2x2 projectors (P0, P1) = (I +/- r.sigma)/2 for the measurement."""
    up, down = basis_kets(spec.basis)
    return np.outer(up, up.conj()), np.outer(down, down.conj())


def measure(
    state: StateVector,
    spec: MeasurementSpec,
    rng: RandomSource,
    forced: int | None = None,
) -> tuple[int, StateVector]:
    """Projectively measure one qubit; returns (outcome, collapsed state).

    Outcome 0 projects onto the basis "up" ket, outcome 1 onto "down".  If
    `forced` is given the corresponding branch is taken deterministically; a
    forced branch with probability below 1e-14 is rejected.
    """
    _check_qubit(state, spec.target)
    n = state.num_qubits
    axis = n - 1 - spec.target
    up, down = basis_kets(spec.basis)

    tensor = np.moveaxis(state.amplitudes.reshape((2,) * n), axis, 0).reshape(2, -1)
    branch0 = up.conj() @ tensor
    branch1 = down.conj() @ tensor
    p0 = float(np.real(np.vdot(branch0, branch0)))
    p1 = float(np.real(np.vdot(branch1, branch1)))
    if p0 < _MIN_PROBABILITY and p1 < _MIN_PROBABILITY:
        raise ArithmeticError("state is not normalised: both outcomes have ~zero probability")

    if forced is not None:
        if forced not in (0, 1):
            raise ValueError("forced outcome must be 0 or 1")
        if (p0 if forced == 0 else p1) < _MIN_PROBABILITY:
            raise ValueError(f"forced outcome {forced} has probability below 1e-14")
        outcome = forced
    elif p0 < _MIN_PROBABILITY:
        outcome = 1
    elif p1 < _MIN_PROBABILITY:
        outcome = 0
    else:
        outcome = 0 if rng.random() < p0 / (p0 + p1) else 1

    ket, branch, p = (up, branch0, p0) if outcome == 0 else (down, branch1, p1)
    collapsed = np.outer(ket, branch / sqrt(p))
    collapsed = np.moveaxis(collapsed.reshape((2,) * n), 0, axis)
    return outcome, StateVector(n, np.ascontiguousarray(collapsed).reshape(-1))


def fidelity(a: StateVector, b: StateVector) -> float:
    """|<a|b>|^2, the global-phase-insensitive overlap."""
    if a.num_qubits != b.num_qubits:
        raise ValueError("states have different qubit counts")
    return float(np.abs(np.vdot(a.amplitudes, b.amplitudes)) ** 2)
