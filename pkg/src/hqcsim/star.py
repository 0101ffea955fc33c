"""Measurement-based multi-qubit Z-rotations on star graph states.

A rotation exp(-i theta Z^{x n} / 2) on a set of register qubits is executed
by entangling one ancilla (prepared in an X eigenstate with sign (-1)^kappa)
with every participating qubit via CZ, then measuring the ancilla in the
Bloch basis (theta, (-1)^kappa * pi/2).  The measurement outcome m leaves the
Pauli byproduct (Z^{x n})^m on the participating qubits; the ancilla ends up
disentangled and can be recycled.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import (
    BlochVector,
    MeasurementSpec,
    RandomSource,
    StateVector,
    apply_cz,
    apply_named,
    basis_kets,
    measure,
)
from .tracker import adapt_azimuth

__all__ = [
    "AncillaPrep",
    "RotationRecord",
    "StarGraph",
    "apply_multi_z_unitary",
    "build_star_state",
    "check_stabilizer",
    "multi_z_rotation",
    "reset_to_zero",
    "rz_teleport_gadget",
]


@dataclass(frozen=True)
class AncillaPrep:
    """X-eigenstate preparation sign: ancilla starts as (|0> + (-1)^kappa |1>)/sqrt(2)."""

    kappa: int = 0

    def __post_init__(self):
        if self.kappa not in (0, 1):
            raise ValueError("kappa must be 0 or 1")


@dataclass(frozen=True)
class StarGraph:
    """One ancilla CZ-connected to a nonempty set of register qubits."""

    ancilla: int
    leaves: tuple[int, ...]

    def __post_init__(self):
        if not self.leaves:
            raise ValueError("star graph needs at least one leaf")
        if len(set(self.leaves)) != len(self.leaves):
            raise ValueError("leaves must be distinct")
        if self.ancilla in self.leaves:
            raise ValueError("ancilla cannot be one of the leaves")


@dataclass(frozen=True)
class RotationRecord:
    """What one measurement-based rotation actually did."""

    theta_requested: float
    theta_executed: float
    kappa: int
    outcome: int
    leaves: tuple[int, ...]


def _require_ancilla_zero(state: StateVector, ancilla: int) -> None:
    mask = (np.arange(state.amplitudes.size) >> ancilla) & 1
    weight = float(np.sum(np.abs(state.amplitudes[mask == 1]) ** 2))
    if weight > 1e-12:
        raise ValueError(f"ancilla qubit {ancilla} is not in |0> (weight {weight:.3e} on |1>)")


def build_star_state(state: StateVector, graph: StarGraph, prep: AncillaPrep) -> StateVector:
    """Prepare the ancilla in its signed X eigenstate and CZ it to every leaf.

    The ancilla must enter in |0>; the result is
    (|0>_a (x) |psi> + (-1)^kappa |1>_a (x) Z^{x n} |psi>) / sqrt(2).
    """
    _require_ancilla_zero(state, graph.ancilla)
    out = apply_named(state, graph.ancilla, "H")
    if prep.kappa:
        out = apply_named(out, graph.ancilla, "Z")
    for leaf in graph.leaves:
        out = apply_cz(out, graph.ancilla, leaf)
    return out


def check_stabilizer(state: StateVector, graph: StarGraph) -> float:
    """Expectation of the correlation operator X_a (x) prod_leaves Z_b.

    A star state built with sign kappa returns (-1)^kappa; a product state
    with the ancilla in |0> returns 0.
    """
    transformed = apply_named(state, graph.ancilla, "X")
    for leaf in graph.leaves:
        transformed = apply_named(transformed, leaf, "Z")
    return float(np.real(np.vdot(state.amplitudes, transformed.amplitudes)))


def multi_z_rotation(
    state: StateVector,
    leaves: tuple[int, ...] | list[int],
    theta: float,
    prep: AncillaPrep,
    ancilla: int,
    rng: RandomSource,
    forced: int | None = None,
    theta_requested: float | None = None,
) -> tuple[RotationRecord, StateVector]:
    """Execute exp(-i theta Z^{x n}/2) on `leaves` by one ancilla measurement.

    The ancilla must enter in |0>.  The returned state equals, up to global
    phase, (Z^{x n})^m exp(-i theta Z^{x n}/2) applied to the input, with the
    ancilla left disentangled in its post-measurement ket (reset separately to
    recycle it).  `theta` is the angle actually executed; `theta_requested`
    (default: theta) is recorded for bookkeeping when a sign adaptation was
    applied upstream.
    """
    leaves = tuple(leaves)
    graph = StarGraph(ancilla, leaves)
    entangled = build_star_state(state, graph, prep)
    basis = BlochVector(theta, adapt_azimuth(prep.kappa))
    outcome, post = measure(entangled, MeasurementSpec(ancilla, basis), rng, forced=forced)
    record = RotationRecord(
        theta_requested=theta if theta_requested is None else theta_requested,
        theta_executed=theta,
        kappa=prep.kappa,
        outcome=outcome,
        leaves=leaves,
    )
    return record, post


def reset_to_zero(
    state: StateVector, q: int, rng: RandomSource, forced: int | None = None
) -> StateVector:
    """Return qubit q to |0> by a Z measurement and a conditional X flip."""
    outcome, post = measure(state, MeasurementSpec(q, BlochVector(0.0, 0.0)), rng, forced=forced)
    if outcome == 1:
        post = apply_named(post, q, "X")
    return post


def apply_multi_z_unitary(state: StateVector, leaves: tuple[int, ...] | list[int], theta: float) -> StateVector:
    """Reference unitary action of exp(-i theta Z^{x n}/2) as a diagonal."""
    leaves = tuple(leaves)
    if not leaves:
        raise ValueError("rotation needs at least one qubit")
    if len(set(leaves)) != len(leaves):
        raise ValueError("leaves must be distinct")
    mask = 0
    for leaf in leaves:
        if not 0 <= leaf < state.num_qubits:
            raise ValueError(f"qubit {leaf} out of range")
        mask |= 1 << leaf
    indices = np.arange(state.amplitudes.size)
    ones = indices & mask
    parity = np.zeros_like(indices)
    while mask:
        parity ^= ones & 1
        ones >>= 1
        mask >>= 1
    # Z^{x n} eigenvalue is (-1)^parity, so the phase is exp(-i theta/2 * (+/-1))
    phases = np.exp(-0.5j * theta * np.where(parity == 0, 1.0, -1.0))
    return StateVector(state.num_qubits, state.amplitudes * phases)


def rz_teleport_gadget(
    input_state: StateVector,
    phi: float,
    prep: AncillaPrep,
    rng: RandomSource,
    forced: int | None = None,
) -> tuple[int, StateVector]:
    """One-qubit teleportation gadget: measure the input qubit of a two-qubit
    graph state in the basis {(|0> + (-1)^m e^{-i phi} |1>)/sqrt(2)}.

    The ancilla then carries X^m Z^kappa H Rz(phi) applied to the input state
    (up to global phase); returns (m, that one-qubit state).
    """
    if input_state.num_qubits != 1:
        raise ValueError("gadget takes a one-qubit input state")
    # register: qubit 0 = input, qubit 1 = ancilla (starts in |0>)
    amps = np.zeros(4, dtype=complex)
    amps[0] = input_state.amplitudes[0]
    amps[1] = input_state.amplitudes[1]
    pair = StateVector(2, amps)
    pair = build_star_state(pair, StarGraph(ancilla=1, leaves=(0,)), prep)

    outcome, post = measure(pair, MeasurementSpec(0, BlochVector(np.pi / 2, -phi)), rng, forced=forced)
    # project the measured qubit onto its known post-measurement ket to pull
    # out the ancilla's pure state
    up, down = basis_kets(BlochVector(np.pi / 2, -phi))
    ket = up if outcome == 0 else down
    tensor = post.amplitudes.reshape(2, 2)  # [ancilla bit, input bit]
    reduced = tensor @ ket.conj()
    norm = np.linalg.norm(reduced)
    return outcome, StateVector(1, reduced / norm)
