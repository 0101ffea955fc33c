"""End-to-end executors: the hybrid (measurement-based rotations + unitary
Clifford frame) runner, the pure-unitary reference runner, the per-step trace
table, and the equivalence harness.

Hybrid execution uses one extra ancilla qubit appended after the circuit
register; it is re-prepared, measured, and reset for every multi-qubit
rotation.  Per shot the random draws happen in a fixed order (per rotation:
optional kappa draw, measurement, reset; then one readout draw), so identical
(seed, shot) pairs replay identically.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from math import sqrt

import numpy as np

from . import star, tracker
from .circuits import Circuit, CzGate, Gate, MultiZRot, NamedGate, SingleQubit
from .core import BlochVector, RandomSource, StateVector, apply_cz, apply_named, apply_single_qubit, fidelity
from .star import AncillaPrep, RotationRecord
from .tracker import Gf2Expr, InfoFlowVector, render_component, render_flow

__all__ = [
    "EquivalenceReport",
    "ExecutionConfig",
    "ShotResult",
    "TraceTable",
    "corrected_histogram",
    "random_circuit",
    "replay_flow",
    "results_to_json",
    "run_both",
    "run_hqcm",
    "run_unitary",
    "total_variation",
    "verify_equivalence",
]

FIDELITY_BOUND = 1.0 - 1e-10


@dataclass
class ExecutionConfig:
    """Knobs for a hybrid run.

    kappa selects the ancilla preparation signs: "zero" uses each gate's own
    value (default 0), "random" draws a fresh bit per rotation, or a list
    fixes one value per rotation.  forced_outcomes pins every rotation's
    measurement result (length must equal the rotation count).
    """

    mode: str = "hqcm"
    shots: int = 1
    seed: int = 0
    trace: bool = False
    symbolic: bool = False
    forced_outcomes: list[int] | None = None
    kappa: str | list[int] = "zero"
    include_work_readout: bool = False

    def validate(self, circuit: Circuit) -> None:
        if self.mode not in ("hqcm", "unitary", "both"):
            raise ValueError(f"unknown mode {self.mode!r}")
        if self.shots < 1:
            raise ValueError("shots must be >= 1")
        if self.symbolic and self.shots > 1:
            raise ValueError("symbolic mode is single-shot")
        rotations = circuit.rotation_count()
        if self.forced_outcomes is not None and len(self.forced_outcomes) != rotations:
            raise ValueError(
                f"forced_outcomes has {len(self.forced_outcomes)} entries for {rotations} rotations"
            )
        if isinstance(self.kappa, list) and len(self.kappa) != rotations:
            raise ValueError(f"kappa list has {len(self.kappa)} entries for {rotations} rotations")


@dataclass
class TraceRow:
    tau: int
    ix: list
    iz: list
    angles: list[dict] = field(default_factory=list)
    outcomes: list[dict] = field(default_factory=list)


@dataclass
class TraceTable:
    """Flow vectors and adaptation records per computation step.

    Row tau holds the flow after step tau (row 0 is the all-zero start); its
    angle/outcome cells describe the rotations of step tau + 1, which are the
    ones the row's flow steers.
    """

    rows: list[TraceRow]
    blocks: dict[str, frozenset]

    def to_records(self) -> list[dict]:
        records = []
        for row in self.rows:
            records.append(
                {
                    "tau": row.tau,
                    "i_x": [_component_record(c) for c in row.ix],
                    "i_z": [_component_record(c) for c in row.iz],
                    "angles": [
                        {
                            "rotation": a["rotation"],
                            "sign": a["sign"],
                            "parity": _component_record(a["parity"]),
                        }
                        for a in row.angles
                    ],
                    "outcomes": [
                        {
                            "rotation": o["rotation"],
                            "label": o["label"],
                            "value": o["value"],
                            "kappa": o["kappa"],
                        }
                        for o in row.outcomes
                    ],
                }
            )
        return records

    def format_text(self) -> str:
        lines = []
        for row in self.rows:
            lines.append(f"tau={row.tau}")
            lines.append(f"  I_x = {render_flow(row.ix, self.blocks)}")
            lines.append(f"  I_z = {render_flow(row.iz, self.blocks)}")
            if row.angles:
                lines.append("  angles:   " + "; ".join(_angle_text(a, self.blocks) for a in row.angles))
            if row.outcomes:
                cells = [f"{o['label']}{_kappa_suffix(o)} <- {o['rotation']}" for o in row.outcomes]
                if len(row.outcomes) > 1:
                    block = row.outcomes[0]["block"]
                    cells.append(f"{block} = " + "+".join(o["label"] for o in row.outcomes))
                lines.append("  outcomes: " + "; ".join(cells))
        return "\n".join(lines) + "\n"


def _component_record(component):
    return component if isinstance(component, int) else str(component)


def _kappa_suffix(outcome: dict) -> str:
    return f" (kappa={outcome['kappa']})" if outcome["kappa"] else ""


def _angle_text(note: dict, blocks) -> str:
    sign = "+" if note["sign"] > 0 else "-"
    parity = note["parity"]
    if parity == 0:
        return f"{note['rotation']}: no change"
    if isinstance(parity, int):
        flipped = "-" if sign == "+" else "+"
        return f"{note['rotation']}: {sign}θ -> {flipped}θ"
    return f"{note['rotation']}: {sign}θ -> {sign}(-1)^({render_component(parity, blocks)}) θ"


def _rotation_label(leaves: tuple[int, ...], theta: float) -> str:
    names = "".join(str(q + 1) for q in sorted(leaves))
    sign = "+" if theta >= 0 else "-"
    return f"U^{names}_{'z' * len(leaves)}({sign}θ)"


@dataclass
class ShotResult:
    """One hybrid shot: raw and corrected readout over the reported qubits,
    the final numeric flow over the full register, and the rotation log."""

    raw: tuple[int, ...]
    corrected: tuple[int, ...]
    flow: InfoFlowVector
    rotations: list[RotationRecord]
    reported_qubits: tuple[int, ...]
    fidelity: float | None = None
    trace: TraceTable | None = None


def _embed_logical(circuit: Circuit, initial_logical: StateVector | None, extra_ancilla: bool) -> StateVector:
    """Full-register state: logical amplitudes in place, works in |+>, and an
    optional trailing ancilla in |0>."""
    n = circuit.num_qubits
    logicals = circuit.logicals
    works = circuit.works
    if initial_logical is None:
        psi = np.zeros(2 ** len(logicals), dtype=complex)
        psi[0] = 1.0
    else:
        if initial_logical.num_qubits != len(logicals):
            raise ValueError(
                f"initial state has {initial_logical.num_qubits} qubits, circuit has {len(logicals)} logical"
            )
        psi = initial_logical.amplitudes
    indices = np.arange(2**n)
    key = np.zeros(2**n, dtype=np.int64)
    for pos, q in enumerate(logicals):
        key |= ((indices >> q) & 1) << pos
    amps = psi[key] / sqrt(2 ** len(works))
    if extra_ancilla:
        amps = np.concatenate([amps, np.zeros_like(amps)])
        return StateVector(n + 1, amps)
    return StateVector(n, amps)


def _logical_key(circuit: Circuit, num_qubits: int) -> np.ndarray:
    indices = np.arange(2**num_qubits)
    key = np.zeros(2**num_qubits, dtype=np.int64)
    for pos, q in enumerate(circuit.logicals):
        key |= ((indices >> q) & 1) << pos
    return key


def _bits_to_string(bits) -> str:
    return "".join(str(b) for b in bits)


def _numeric(component, binding) -> int:
    if isinstance(component, int):
        return component & 1
    return component.evaluate(binding)


def run_unitary(
    circuit: Circuit,
    initial_logical: StateVector | None = None,
    include_work: bool = False,
) -> tuple[StateVector, dict[str, float]]:
    """Execute every gate as a unitary (rotations as exact diagonals).

    Returns the output state over the circuit register and its computational
    basis distribution over the logical qubits (or all register qubits when
    include_work is set); bitstring keys list qubits in ascending index order.
    """
    circuit.validate()
    state = _embed_logical(circuit, initial_logical, extra_ancilla=False)
    for gate in circuit.gates:
        if isinstance(gate, NamedGate):
            state = apply_named(state, gate.q, gate.name, gate.phi)
        elif isinstance(gate, SingleQubit):
            state = apply_single_qubit(state, gate.q, BlochVector(gate.theta, gate.phi), gate.alpha)
        elif isinstance(gate, CzGate):
            state = apply_cz(state, gate.a, gate.b)
        elif isinstance(gate, MultiZRot):
            state = star.apply_multi_z_unitary(state, gate.leaves, gate.theta)
        else:
            raise ValueError(f"cannot execute {gate!r}")
    probs = state.probabilities()
    if include_work:
        keys = np.arange(probs.size)
        width = circuit.num_qubits
    else:
        keys = _logical_key(circuit, circuit.num_qubits)
        width = len(circuit.logicals)
    marginal = np.bincount(keys, weights=probs, minlength=2**width)
    distribution = {
        _bits_to_string([(k >> pos) & 1 for pos in range(width)]): float(p)
        for k, p in enumerate(marginal)
    }
    return state, distribution


def _execute_hybrid(
    circuit: Circuit,
    config: ExecutionConfig,
    shot: int,
    initial_logical: StateVector | None,
):
    """One hybrid trajectory without the final readout.

    Returns (state incl. ancilla, flow, rotation records, binding, trace,
    and the shot's live random stream for any follow-up draws).
    """
    rng = RandomSource(config.seed, shot)
    ancilla = circuit.num_qubits
    state = _embed_logical(circuit, initial_logical, extra_ancilla=True)
    flow = tracker.init_flow(circuit.num_qubits)
    binding: dict[str, int] = {}
    records: list[RotationRecord] = []
    rotation_index = 0

    want_trace = config.trace or config.symbolic
    rows: list[TraceRow] = []
    blocks: dict[str, frozenset] = {}
    if want_trace:
        rows.append(TraceRow(0, list(flow.x), list(flow.z)))

    for step_pos, group in enumerate(circuit.step_groups(), start=1):
        step_gates = [circuit.gates[i] for i in group]
        rotations_in_step = sum(1 for g in step_gates if isinstance(g, MultiZRot))
        k_in_step = 0
        for gate in step_gates:
            if isinstance(gate, NamedGate):
                if gate.name == "H":
                    state = apply_named(state, gate.q, "H")
                    flow = tracker.propagate(flow, ("H", gate.q))
                elif gate.name == "X":
                    state = apply_named(state, gate.q, "X")
                else:  # RZ: rotation path, executed with a sign-adapted angle
                    x_q = _numeric(flow.x[gate.q], binding)
                    state = apply_named(state, gate.q, "RZ", (-1) ** x_q * gate.phi)
            elif isinstance(gate, SingleQubit):
                x_q = _numeric(flow.x[gate.q], binding)
                z_q = _numeric(flow.z[gate.q], binding)
                axis = tracker.adapt_axis(x_q, z_q, BlochVector(gate.theta, gate.phi))
                state = apply_single_qubit(state, gate.q, axis, gate.alpha)
            elif isinstance(gate, CzGate):
                state = apply_cz(state, gate.a, gate.b)
                flow = tracker.propagate(flow, ("CZ", gate.a, gate.b))
            elif isinstance(gate, MultiZRot):
                k_in_step += 1
                parity = tracker.angle_parity(flow, gate.leaves)
                parity_value = _numeric(parity, binding) if isinstance(parity, Gf2Expr) else parity & 1
                theta_exec = (-1) ** parity_value * gate.theta

                if isinstance(config.kappa, list):
                    kappa = config.kappa[rotation_index]
                elif config.kappa == "random":
                    kappa = rng.bit()
                else:
                    kappa = gate.kappa
                forced = None
                if config.forced_outcomes is not None:
                    forced = config.forced_outcomes[rotation_index]

                record, state = star.multi_z_rotation(
                    state,
                    gate.leaves,
                    theta_exec,
                    AncillaPrep(kappa),
                    ancilla,
                    rng,
                    forced=forced,
                    theta_requested=gate.theta,
                )
                state = star.reset_to_zero(state, ancilla, rng)
                records.append(record)
                rotation_index += 1

                label = f"m{step_pos}" if rotations_in_step == 1 else f"m{step_pos}{k_in_step}"
                if config.symbolic:
                    binding[label] = record.outcome
                    absorbed = Gf2Expr.var(label)
                else:
                    absorbed = record.outcome
                flow = tracker.absorb_rotation_outcome(flow, gate.leaves, absorbed)

                if want_trace:
                    rotation_name = _rotation_label(gate.leaves, gate.theta)
                    rows[-1].angles.append(
                        {"rotation": rotation_name, "sign": 1 if gate.theta >= 0 else -1, "parity": parity}
                    )
                    rows[-1].outcomes.append(
                        {
                            "rotation": rotation_name,
                            "label": label,
                            "value": record.outcome,
                            "kappa": kappa,
                            "block": f"m{step_pos}",
                        }
                    )
            else:
                raise ValueError(f"cannot execute {gate!r}")
        if want_trace:
            if rotations_in_step > 1:
                blocks[f"m{step_pos}"] = frozenset(o["label"] for o in rows[-1].outcomes)
            rows.append(TraceRow(step_pos, list(flow.x), list(flow.z)))

    trace = TraceTable(rows, blocks) if want_trace else None
    return state, flow, records, binding, trace, rng


def run_hqcm(
    circuit: Circuit,
    config: ExecutionConfig | None = None,
    initial_logical: StateVector | None = None,
) -> list[ShotResult]:
    """Hybrid execution: unitary single-qubit/CZ gates, measurement-based
    multi-qubit rotations, and a final computational-basis readout corrected
    by the x-part of the flow vector."""
    circuit.validate()
    config = config or ExecutionConfig()
    config.validate(circuit)

    reported = circuit.logicals if not config.include_work_readout else tuple(range(circuit.num_qubits))
    results = []
    for shot in range(config.shots):
        state, flow, records, binding, trace, rng = _execute_hybrid(circuit, config, shot, initial_logical)
        results.append(_readout_shot(circuit, state, flow, records, binding, trace, reported, rng))
    return results


def _readout_shot(circuit, state, flow, records, binding, trace, reported, rng) -> ShotResult:
    numeric_flow = flow if flow.is_numeric() else flow.evaluate(binding)
    probs = state.probabilities()
    half = probs.size // 2  # ancilla (top qubit) is |0> after resets
    register_probs = probs[:half] + probs[half:]
    index = rng.sample_index(register_probs)
    raw_full = [(index >> q) & 1 for q in range(circuit.num_qubits)]
    corrected_full = tracker.correct_readout(raw_full, numeric_flow)
    return ShotResult(
        raw=tuple(raw_full[q] for q in reported),
        corrected=tuple(corrected_full[q] for q in reported),
        flow=numeric_flow,
        rotations=records,
        reported_qubits=reported,
        trace=trace,
    )


def corrected_histogram(results: list[ShotResult]) -> dict[str, int]:
    histogram: dict[str, int] = {}
    for result in results:
        key = _bits_to_string(result.corrected)
        histogram[key] = histogram.get(key, 0) + 1
    return histogram


def total_variation(p: dict[str, float], q: dict[str, float]) -> float:
    keys = set(p) | set(q)
    return 0.5 * sum(abs(p.get(k, 0.0) - q.get(k, 0.0)) for k in keys)


def run_both(
    circuit: Circuit,
    config: ExecutionConfig,
    initial_logical: StateVector | None = None,
) -> tuple[list[ShotResult], StateVector, dict[str, float], float]:
    """Hybrid and unitary runs side by side.

    Fills each shot's fidelity (byproduct-corrected state against the unitary
    reference) and returns the total-variation distance between the corrected
    readout histogram and the reference distribution.
    """
    circuit.validate()
    config.validate(circuit)
    unitary_state, distribution = run_unitary(circuit, initial_logical)
    reference = _with_ancilla(unitary_state)
    reported = circuit.logicals if not config.include_work_readout else tuple(range(circuit.num_qubits))
    results = []
    for shot in range(config.shots):
        state, flow, records, binding, trace, rng = _execute_hybrid(circuit, config, shot, initial_logical)
        numeric_flow = flow if flow.is_numeric() else flow.evaluate(binding)
        result = _readout_shot(circuit, state, flow, records, binding, trace, reported, rng)
        result.fidelity = fidelity(_undo_byproduct(state, numeric_flow), reference)
        results.append(result)
    shots = max(1, len(results))
    empirical = {k: v / shots for k, v in corrected_histogram(results).items()}
    tv = total_variation(empirical, distribution)
    return results, unitary_state, distribution, tv


def _with_ancilla(state: StateVector) -> StateVector:
    amps = np.concatenate([state.amplitudes, np.zeros_like(state.amplitudes)])
    return StateVector(state.num_qubits + 1, amps)


def _undo_byproduct(state: StateVector, flow: InfoFlowVector) -> StateVector:
    # X^x Z^z is self-inverse up to a phase, so applying the byproduct again
    # cancels it for fidelity purposes.
    for name, q in tracker.byproduct_to_unitary(flow):
        state = apply_named(state, q, name)
    return state


@dataclass
class EquivalenceReport:
    trials: int
    min_fidelity: float
    mean_fidelity: float
    fidelities: list[float]

    @property
    def passed(self) -> bool:
        return self.min_fidelity >= FIDELITY_BOUND


def verify_equivalence(
    circuit: Circuit,
    trials: int = 20,
    seed: int = 0,
    random_inputs: bool = False,
) -> EquivalenceReport:
    """Check that byproduct-corrected hybrid trajectories match the unitary
    reference state, trial by trial.

    Trials differ in their measurement randomness; with random_inputs each
    trial also draws a fresh Haar-like logical input state.
    """
    circuit.validate()
    input_rng = np.random.default_rng(seed)
    fidelities = []
    config = ExecutionConfig(seed=seed)
    for trial in range(trials):
        initial = _random_state(len(circuit.logicals), input_rng) if random_inputs else None
        state, flow, _, binding, _, _ = _execute_hybrid(circuit, config, trial, initial)
        numeric_flow = flow if flow.is_numeric() else flow.evaluate(binding)
        corrected = _undo_byproduct(state, numeric_flow)
        reference, _ = run_unitary(circuit, initial)
        fidelities.append(fidelity(corrected, _with_ancilla(reference)))
    return EquivalenceReport(
        trials=trials,
        min_fidelity=min(fidelities),
        mean_fidelity=sum(fidelities) / len(fidelities),
        fidelities=fidelities,
    )


def _random_state(num_qubits: int, rng: np.random.Generator) -> StateVector:
    amps = rng.normal(size=2**num_qubits) + 1j * rng.normal(size=2**num_qubits)
    return StateVector(num_qubits, amps / np.linalg.norm(amps))


def random_circuit(num_logical: int, num_gates: int, rng: np.random.Generator) -> Circuit:
    """Random test circuit: gates drawn uniformly from H, RZ(random),
    SQ(random axis and angle), CZ(random pair), and MZROT(random subset of at
    most three qubits, random angle).  Reproducible from the generator state.
    """
    gates: list[Gate] = []
    for _ in range(num_gates):
        kind = rng.integers(0, 5)
        if kind == 0:
            gates.append(NamedGate(int(rng.integers(0, num_logical)), "H"))
        elif kind == 1:
            gates.append(NamedGate(int(rng.integers(0, num_logical)), "RZ", float(rng.uniform(0, 2 * np.pi))))
        elif kind == 2:
            gates.append(
                SingleQubit(
                    int(rng.integers(0, num_logical)),
                    float(rng.uniform(0, np.pi)),
                    float(rng.uniform(0, 2 * np.pi)),
                    float(rng.uniform(0, 2 * np.pi)),
                )
            )
        elif kind == 3:
            a, b = rng.choice(num_logical, size=2, replace=False)
            gates.append(CzGate(int(a), int(b)))
        else:
            size = int(rng.integers(1, min(3, num_logical) + 1))
            leaves = tuple(int(q) for q in rng.choice(num_logical, size=size, replace=False))
            gates.append(MultiZRot(leaves, float(rng.uniform(0, 2 * np.pi))))
    return Circuit(num_logical, 0, gates)


def replay_flow(circuit: Circuit, outcomes: list[int]) -> InfoFlowVector:
    """Recompute the final flow from the circuit and the rotation outcomes
    alone; no statevector involved."""
    flow = tracker.init_flow(circuit.num_qubits)
    index = 0
    for gate in circuit.gates:
        if isinstance(gate, NamedGate) and gate.name == "H":
            flow = tracker.propagate(flow, ("H", gate.q))
        elif isinstance(gate, CzGate):
            flow = tracker.propagate(flow, ("CZ", gate.a, gate.b))
        elif isinstance(gate, MultiZRot):
            flow = tracker.absorb_rotation_outcome(flow, gate.leaves, outcomes[index] & 1)
            index += 1
    if index != len(outcomes):
        raise ValueError(f"circuit has {index} rotations, got {len(outcomes)} outcomes")
    return flow


def results_to_json(
    circuit: Circuit,
    config: ExecutionConfig,
    results: list[ShotResult],
    unitary_distribution: dict[str, float] | None = None,
    tv_distance: float | None = None,
) -> str:
    """Canonical JSON for a run; identical inputs yield identical bytes."""
    payload: dict = {
        "config": {
            "mode": config.mode,
            "shots": config.shots,
            "seed": config.seed,
            "symbolic": config.symbolic,
            "kappa": config.kappa if isinstance(config.kappa, str) else list(config.kappa),
            "include_work_readout": config.include_work_readout,
        },
        "circuit": {
            "num_logical": circuit.num_logical,
            "num_work": circuit.num_work,
            "num_gates": len(circuit.gates),
            "tau_max": circuit.tau_max,
        },
        "shots": [
            {
                "s": _bits_to_string(r.raw),
                "s_corrected": _bits_to_string(r.corrected),
                "outcomes": [
                    {
                        "leaves": [q + 1 for q in record.leaves],
                        "m": record.outcome,
                        "kappa": record.kappa,
                        "theta_requested": record.theta_requested,
                        "theta_executed": record.theta_executed,
                    }
                    for record in r.rotations
                ],
            }
            for r in results
        ],
        "histogram": corrected_histogram(results),
    }
    if results and results[0].fidelity is not None:
        payload["fidelities"] = [r.fidelity for r in results]
    if results and results[0].trace is not None:
        payload["trace"] = results[0].trace.to_records()
    if unitary_distribution is not None:
        payload["unitary"] = {"distribution": unitary_distribution}
    if tv_distance is not None:
        payload["tv_distance"] = tv_distance
    return json.dumps(payload, sort_keys=True, indent=2) + "\n"
