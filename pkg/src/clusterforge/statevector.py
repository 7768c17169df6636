"""Dense pure-state simulator for small qubit registers.

Conventions, fixed here and used by every other module:

* Qubit 0 is the most significant bit of the amplitude index, so
  ``amps.reshape([2] * num_qubits)`` places qubit q on tensor axis q.
* ``Rz(xi) = diag(1, exp(i xi))``: the phase sits on ``|1>`` only.
* The rotated measurement basis with angle xi has the m=0 eigenstate
  ``(|0> + exp(-i xi)|1>)/sqrt(2)``.  Measuring in it applies Rz(xi), then a
  Hadamard, then a sigma_z readout, and leaves the measured qubit in the
  computational state ``|m>`` (a classical record, convenient for later
  extraction).  xi = 0 is the sigma_x basis with m=0 for ``|+>``.

States are small dense complex vectors; controlled-phase gates are diagonal
and applied in place.  A single state is only ever touched by one thread;
parallelism belongs to the trial level above this module.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

MAX_QUBITS = 24

NORM_TOL = 1e-12
STATE_TOL = 1e-10
PROB_TOL = 1e-12

_INV_SQRT2 = 1.0 / math.sqrt(2.0)

# Verification hook: when nonzero every Hadamard picks up a spurious extra
# diag(1, exp(i * GATE_TAMPER)) factor.  The self-check suite uses this as a
# negative control; it must stay 0.0 in normal operation.
GATE_TAMPER = 0.0


class NormalizationError(ValueError):
    """An input amplitude pair is not normalized."""


class ForcedOutcomeError(ValueError):
    """A forced measurement outcome has (numerically) zero probability."""


@dataclass
class PureState:
    """Dense amplitude vector over ``num_qubits`` qubits."""

    num_qubits: int
    amps: np.ndarray

    def __post_init__(self):
        if not 1 <= self.num_qubits <= MAX_QUBITS:
            raise ValueError(
                f"register size {self.num_qubits} outside 1..{MAX_QUBITS}"
            )
        self.amps = np.asarray(self.amps, dtype=complex).reshape(-1)
        if self.amps.size != 1 << self.num_qubits:
            raise ValueError("amplitude vector length is not 2**num_qubits")

    def tensor(self) -> np.ndarray:
        """View of the amplitudes with one axis per qubit."""
        return self.amps.reshape([2] * self.num_qubits)

    def norm_squared(self) -> float:
        return float(np.vdot(self.amps, self.amps).real)

    def copy(self) -> "PureState":
        return PureState(self.num_qubits, self.amps.copy())

    def probability_of_bit(self, qubit: int, bit: int) -> float:
        """Z-basis probability of reading ``bit`` on ``qubit``."""
        _check_qubit(self, qubit)
        t = self.tensor()
        sl = np.take(t, bit, axis=qubit)
        return float(np.vdot(sl, sl).real)


def _check_qubit(state: PureState, qubit: int):
    if not 0 <= qubit < state.num_qubits:
        raise IndexError(f"qubit {qubit} out of range for {state.num_qubits}-qubit register")


def _check_norm(state: PureState):
    if abs(state.norm_squared() - 1.0) > max(NORM_TOL, 1e-12 * state.amps.size):
        raise NormalizationError("state norm drifted beyond tolerance")


def _as_pair(entry) -> np.ndarray:
    """Normalize a single-qubit initializer to an amplitude pair."""
    if isinstance(entry, str):
        if entry == "0":
            return np.array([1.0, 0.0], dtype=complex)
        if entry == "1":
            return np.array([0.0, 1.0], dtype=complex)
        if entry == "+":
            return np.array([_INV_SQRT2, _INV_SQRT2], dtype=complex)
        if entry == "-":
            return np.array([_INV_SQRT2, -_INV_SQRT2], dtype=complex)
        raise ValueError(f"unknown initializer token {entry!r}")
    pair = np.array(entry, dtype=complex, copy=True).reshape(-1)
    if pair.size != 2:
        raise ValueError("arbitrary initializer must have two amplitudes")
    n2 = float(np.vdot(pair, pair).real)
    if abs(n2 - 1.0) > 1e-9:
        raise NormalizationError(f"|alpha|^2+|beta|^2 = {n2!r}, expected 1")
    return pair


def init_register(assignments) -> PureState:
    """Product state from per-qubit initializers.

    Each entry is one of the tokens ``"0" | "1" | "+" | "-"`` or an arbitrary
    normalized amplitude pair ``(alpha, beta)``.  Entry 0 is the leftmost
    tensor factor (qubit 0, most significant index bit).
    """
    pairs = [_as_pair(a) for a in assignments]
    if not pairs:
        raise ValueError("empty register")
    if len(pairs) > MAX_QUBITS:
        raise ValueError(f"register size {len(pairs)} exceeds MAX_QUBITS={MAX_QUBITS}")
    amps = pairs[0]
    for p in pairs[1:]:
        amps = np.kron(amps, p)
    return PureState(len(pairs), amps)


def _hadamard_matrix() -> np.ndarray:
    h = np.array([[1.0, 1.0], [1.0, -1.0]], dtype=complex) * _INV_SQRT2
    if GATE_TAMPER:
        h = np.diag([1.0, np.exp(1j * GATE_TAMPER)]) @ h
    return h


def apply_gate(state: PureState, qubit: int, gate: str, angle: float | None = None) -> PureState:
    """Apply one of H, X, Z, RZ(angle) to ``qubit`` in place."""
    _check_qubit(state, qubit)
    t = state.tensor()
    if gate == "H":
        moved = np.moveaxis(t, qubit, 0)
        if GATE_TAMPER:
            h = _hadamard_matrix()
            np.copyto(moved, np.tensordot(h, moved, axes=([1], [0])))
        else:
            top = moved[0].copy()
            moved[0] = (top + moved[1]) * _INV_SQRT2
            moved[1] = (top - moved[1]) * _INV_SQRT2
    elif gate == "X":
        np.copyto(t, np.flip(t, axis=qubit))
    elif gate == "Z":
        idx = [slice(None)] * state.num_qubits
        idx[qubit] = 1
        t[tuple(idx)] *= -1.0
    elif gate == "RZ":
        if angle is None:
            raise ValueError("RZ requires an angle")
        idx = [slice(None)] * state.num_qubits
        idx[qubit] = 1
        t[tuple(idx)] *= np.exp(1j * angle)
    else:
        raise ValueError(f"unknown gate {gate!r}")
    return state


def apply_controlled_phase(
    state: PureState, control: int, target: int, phi: float, variant: str = "CSX"
) -> PureState:
    """Diagonal controlled-phase gate on an ordered qubit pair, in place.

    ``CS`` multiplies the ``|11>`` component of (control, target) by
    ``exp(i phi)``; ``CSX`` multiplies ``|10>`` (control = 1, target = 0)
    instead, i.e. CSX_phi = (I ⊗ X) CS_phi (I ⊗ X).
    """
    _check_qubit(state, control)
    _check_qubit(state, target)
    if control == target:
        raise ValueError("control and target must differ")
    if variant not in ("CS", "CSX"):
        raise ValueError(f"unknown controlled-phase variant {variant!r}")
    t = state.tensor()
    idx = [slice(None)] * state.num_qubits
    idx[control] = 1
    idx[target] = 1 if variant == "CS" else 0
    t[tuple(idx)] *= np.exp(1j * phi)
    return state


def phase_from_interaction(g: float, t: float, hbar: float) -> float:
    """Accumulated phase g*t/hbar of an always-on pairwise interaction."""
    if hbar <= 0:
        raise ValueError("hbar must be positive")
    return g * t / hbar


@dataclass(frozen=True)
class MeasurementRecord:
    qubit: int
    basis: str  # "z" or "xi"
    xi: float
    outcome: int
    probability: float


def measurement_probabilities(
    state: PureState, qubit: int, basis: str = "z", xi: float = 0.0
) -> tuple[float, float]:
    """Outcome probabilities (p0, p1) without collapsing the state."""
    if basis == "z":
        p1 = state.probability_of_bit(qubit, 1)
    elif basis == "xi":
        probe = state.copy()
        apply_gate(probe, qubit, "RZ", xi)
        apply_gate(probe, qubit, "H")
        p1 = probe.probability_of_bit(qubit, 1)
    else:
        raise ValueError(f"unknown basis {basis!r}")
    return 1.0 - p1, p1


def measure(
    state: PureState,
    qubit: int,
    basis: str = "z",
    xi: float = 0.0,
    outcome: int | None = None,
    rng: np.random.Generator | None = None,
) -> tuple[MeasurementRecord, PureState]:
    """Projective measurement with Born-rule sampling or a forced outcome.

    The measured qubit is left in the computational state ``|m>`` (for the
    rotated basis this is the post-rotation frame), so it can later be
    sliced away with :func:`extract_qubits`.  Forcing an outcome whose
    probability is below ``PROB_TOL`` raises :class:`ForcedOutcomeError`.
    """
    _check_qubit(state, qubit)
    if basis == "xi":
        apply_gate(state, qubit, "RZ", xi)
        apply_gate(state, qubit, "H")
    elif basis != "z":
        raise ValueError(f"unknown basis {basis!r}")

    p1 = state.probability_of_bit(qubit, 1)
    p0 = 1.0 - p1
    if outcome is None:
        if rng is None:
            raise ValueError("measure needs either a forced outcome or an rng")
        outcome = int(rng.random() >= p0)
    else:
        outcome = int(outcome)
        if outcome not in (0, 1):
            raise ValueError("outcome must be a bit")
    prob = (p0, p1)[outcome]
    if prob <= PROB_TOL:
        raise ForcedOutcomeError(
            f"outcome {outcome} on qubit {qubit} has probability {prob:.3e}"
        )

    t = state.tensor()
    idx = [slice(None)] * state.num_qubits
    idx[qubit] = 1 - outcome
    t[tuple(idx)] = 0.0
    state.amps /= math.sqrt(prob)
    _check_norm(state)
    return MeasurementRecord(qubit, basis, xi, outcome, prob), state


def fidelity_up_to_global_phase(a: PureState, b: PureState) -> float:
    """|<a|b>|^2, which is 1 exactly when the states agree up to global phase."""
    if a.num_qubits != b.num_qubits:
        raise ValueError("states have different register sizes")
    na = math.sqrt(a.norm_squared())
    nb = math.sqrt(b.norm_squared())
    if na < 1e-15 or nb < 1e-15:
        raise ValueError("cannot compare a zero vector")
    return float(abs(np.vdot(a.amps, b.amps)) ** 2 / (na * nb) ** 2)


def schmidt_coefficients(state: PureState, left_qubits) -> np.ndarray:
    """Descending Schmidt coefficients across the given bipartition."""
    left = sorted(set(left_qubits))
    n = state.num_qubits
    if any(not 0 <= q < n for q in left):
        raise IndexError("left cut contains an out-of-range qubit")
    if not left or len(left) == n:
        raise ValueError("cut must be a nontrivial bipartition")
    right = [q for q in range(n) if q not in left]
    mat = state.tensor().transpose(left + right).reshape(1 << len(left), 1 << len(right))
    return np.linalg.svd(mat, compute_uv=False)


def is_product_across_cut(state: PureState, left_qubits) -> bool:
    """True when the Schmidt rank across the cut is 1 (to tolerance 1e-10)."""
    s = schmidt_coefficients(state, left_qubits)
    return bool(s[0] ** 2 > 1.0 - 1e-10)


def _definite_bits(state: PureState, qubits) -> dict[int, int]:
    bits = {}
    for q in qubits:
        p1 = state.probability_of_bit(q, 1)
        if p1 < 1e-12:
            bits[q] = 0
        elif p1 > 1.0 - 1e-12:
            bits[q] = 1
        else:
            raise ValueError(f"qubit {q} is not in a definite computational state")
    return bits


def extract_qubits(state: PureState, keep) -> PureState:
    """Slice down to ``keep`` (ascending order).

    Every discarded qubit must hold a definite computational bit, e.g. the
    frozen record left behind by :func:`measure`.
    """
    keep = sorted(set(keep))
    n = state.num_qubits
    if any(not 0 <= q < n for q in keep):
        raise IndexError("keep contains an out-of-range qubit")
    if not keep:
        raise ValueError("must keep at least one qubit")
    others = [q for q in range(n) if q not in keep]
    bits = _definite_bits(state, others)
    idx = [slice(None)] * n
    for q, b in bits.items():
        idx[q] = b
    sub = state.tensor()[tuple(idx)].reshape(-1)
    norm = math.sqrt(float(np.vdot(sub, sub).real))
    if abs(norm - 1.0) > 1e-9:
        raise ValueError("extraction lost amplitude; discarded qubits not definite")
    return PureState(len(keep), sub / norm)


def reset_qubits(state: PureState, assignments: dict) -> PureState:
    """Re-initialize a subset of qubits to fresh product factors, in place.

    The reset qubits must currently be in definite computational states (they
    were measured out); the rest of the register is untouched.
    """
    n = state.num_qubits
    targets = sorted(assignments)
    if not targets:
        return state
    bits = _definite_bits(state, targets)
    t = state.tensor()
    for q in targets:
        pair = _as_pair(assignments[q])
        moved = np.moveaxis(t, q, 0)
        core = moved[bits[q]].copy()
        moved[0] = core * pair[0]
        moved[1] = core * pair[1]
    _check_norm(state)
    return state


def embed_pair_with_plus_middles(pair: PureState, n_middles: int) -> PureState:
    """(2 + n)-qubit product of a joint end pair with fresh ``|+>`` middles.

    The pair's first qubit becomes qubit 0 and its second becomes the last
    qubit, with the middles in between; this is the layout used when a chain
    is re-entangled between two held end qubits.
    """
    if pair.num_qubits != 2:
        raise ValueError("end pair must be a 2-qubit state")
    if n_middles < 1:
        raise ValueError("need at least one middle qubit")
    mid = np.full(1 << n_middles, (0.5) ** (n_middles / 2.0), dtype=complex)
    t = pair.tensor()  # [a, b]
    amps = (t[:, None, :] * mid[None, :, None]).reshape(-1)
    return PureState(n_middles + 2, amps)
