"""The heralded distillation protocol on an imperfect chain.

A chain of n+2 qubits starts as ``psi ⊗ |+>^(n+1)`` and is entangled by
controlled-phase gates of angle pi + theta between consecutive pairs (left
qubit is the control).  Measuring the middle n qubits in the sigma_x basis
either heralds a perfectly entangled end pair (the theta dependence collapses
to a global phase) or fails, leaving a non-maximally entangled remainder that
can be retried.

Success is decided operationally: an outcome sequence is successful when, for
a spanning set of probe inputs at a generic probe angle, the resulting end
pair matches the heralded map ``(I ⊗ Z^q H) CZ (psi ⊗ |+>)`` up to global
phase, where q is the Hamming weight of the sequence.  A combinatorial
generator reproduces the same sets and is tested against the oracle; the
oracle is canonical.

All randomness flows through numpy Generators supplied by the caller, so
runs are pure functions of their outcome sources.  Branch enumeration never
samples: forcing every middle outcome is exact, and the whole outcome tree
can be read off at once by rotating the middle qubits with Hadamards (see
``branch_tensor``).  Enumerations could be partitioned across disjoint
outcome prefixes and merged in sequence order; nothing here shares mutable
state between runs.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from . import statevector as sv
from .statevector import (
    ForcedOutcomeError,
    PureState,
    apply_controlled_phase,
    apply_gate,
    extract_qubits,
    fidelity_up_to_global_phase,
    init_register,
    measure,
)

# Generic probe angle for the oracle; deliberately incommensurate with pi so
# that an accidental phase coincidence cannot fake a success.
PROBE_THETA = 1.2345

_INV_SQRT2 = 1.0 / math.sqrt(2.0)

# Four states with pairwise independence determine a single-qubit linear map
# up to global phase.
PROBE_INPUTS = (
    (1.0, 0.0),
    (0.0, 1.0),
    (_INV_SQRT2, _INV_SQRT2),
    (_INV_SQRT2, 1j * _INV_SQRT2),
)


class DegenerateInputError(ValueError):
    """The end pair has no amplitude left on |00> and |11>; success is impossible."""


class RetryLimitError(RuntimeError):
    """A retry cap was exhausted before the run completed."""


@dataclass(frozen=True)
class ProtocolSpec:
    """Parameters of one protocol instance: middle-qubit count, error, gate."""

    n: int
    theta: float
    entangler: str = "CSX"

    def __post_init__(self):
        if self.n < 1 or self.n % 2 == 0:
            raise ValueError("n must be an odd integer >= 1")
        if self.entangler not in ("CS", "CSX"):
            raise ValueError(f"unknown entangler {self.entangler!r}")
        if abs(math.cos(self.theta / 2.0)) < 1e-12:
            warnings.warn(
                "theta = pi gives zero success probability", stacklevel=2
            )


@dataclass(frozen=True)
class OutcomeSequence:
    """Ordered middle-qubit outcomes; bit 1 means the |-> result."""

    bits: tuple

    def __post_init__(self):
        if any(b not in (0, 1) for b in self.bits):
            raise ValueError("bits must be 0/1")

    @classmethod
    def from_string(cls, s: str) -> "OutcomeSequence":
        return cls(tuple(int(c) for c in s))

    @property
    def hamming_weight(self) -> int:
        return sum(self.bits)

    def __str__(self) -> str:
        return "".join(str(b) for b in self.bits)

    def __len__(self) -> int:
        return len(self.bits)


@dataclass
class ProtocolRun:
    """Result of one stochastic protocol execution."""

    spec: ProtocolSpec
    outcomes: OutcomeSequence
    success: bool
    end_pair: PureState
    path_probability: float


def _input_pair(input_state) -> np.ndarray:
    if isinstance(input_state, PureState):
        if input_state.num_qubits != 1:
            raise ValueError("input must be a single-qubit state")
        return input_state.amps.copy()
    return sv._as_pair(input_state)


def build_imperfect_chain(input_state, n: int, theta: float, entangler: str = "CSX") -> PureState:
    """(n+2)-qubit chain: psi on qubit 0, |+> elsewhere, entangled left to right.

    All the controlled-phase factors commute, so the application order is
    irrelevant; the test suite asserts this on small cases.
    """
    if n < 1 or n % 2 == 0:
        raise ValueError("n must be an odd integer >= 1")
    pair = _input_pair(input_state)
    state = init_register([pair] + ["+"] * (n + 1))
    return entangle_chain(state, theta, entangler)


def entangle_chain(state: PureState, theta: float, entangler: str = "CSX") -> PureState:
    """Apply the imperfect entangler to every consecutive pair of the register."""
    for q in range(state.num_qubits - 1):
        apply_controlled_phase(state, q, q + 1, math.pi + theta, entangler)
    return state


def branch_tensor(chain: PureState) -> np.ndarray:
    """Exact amplitudes of every middle-outcome branch at once.

    Rotating each middle qubit by a Hadamard turns its computational index
    into the sigma_x outcome bit, so entry ``[b0, m, bE]`` of the returned
    ``(2, 2**n, 2)`` tensor is the joint amplitude of ends ``(b0, bE)`` with
    the forced outcome sequence ``m`` (qubit 1 is the most significant bit of
    m).  Column norms are branch probabilities.  This is algebraically
    identical to forcing the outcomes one measurement at a time, which the
    tests verify.
    """
    probe = chain.copy()
    n = probe.num_qubits - 2
    for q in range(1, n + 1):
        apply_gate(probe, q, "H")
    return probe.tensor().reshape(2, 1 << n, 2)


def heralded_pair(input_state, q: int) -> PureState:
    """The heralded end-pair state ``(I ⊗ Z^q H) CZ (psi ⊗ |+>)``.

    Works out to ``alpha|00> + (-1)^q beta|11>`` for input
    ``alpha|0> + beta|1>``.
    """
    a, b = _input_pair(input_state)
    sign = -1.0 if q % 2 else 1.0
    return PureState(2, np.array([a, 0.0, 0.0, sign * b], dtype=complex))


def _sequence_strings(n: int):
    for m in range(1 << n):
        yield format(m, f"0{n}b")


@lru_cache(maxsize=None)
def enumerate_success_sequences(n: int, probe_theta: float = PROBE_THETA) -> frozenset:
    """Brute-force oracle over all 2**n outcome sequences.

    A sequence is successful iff for every probe input its branch has nonzero
    probability and the end pair matches the heralded map with fidelity at
    least 1 - 1e-9.  Returns the set of bitstrings (leftmost character is the
    outcome of the qubit next to the input).
    """
    if n < 1 or n % 2 == 0:
        raise ValueError("n must be an odd integer >= 1")
    alive = set(_sequence_strings(n))
    for probe in PROBE_INPUTS:
        tens = branch_tensor(build_imperfect_chain(probe, n, probe_theta))
        for seq in list(alive):
            m = int(seq, 2)
            branch = tens[:, m, :].reshape(-1)
            prob = float(np.vdot(branch, branch).real)
            if prob <= 1e-12:
                alive.discard(seq)
                continue
            end = PureState(2, branch / math.sqrt(prob))
            target = heralded_pair(probe, seq.count("1"))
            if fidelity_up_to_global_phase(end, target) < 1.0 - 1e-9:
                alive.discard(seq)
    return frozenset(alive)


@lru_cache(maxsize=None)
def _successful_by_rules(n: int) -> frozenset:
    if n == 1:
        return frozenset({"1"})
    return frozenset(_zero_wrapped(n) | _compositions(n))


@lru_cache(maxsize=None)
def _zero_wrapped(n: int) -> frozenset:
    """Rule (i): wrap any odd-weight successful sequence in a pair of 0s."""
    if n < 3:
        return frozenset()
    return frozenset(
        "0" + s + "0" for s in _successful_by_rules(n - 2) if s.count("1") % 2 == 1
    )


def _atoms(length: int) -> frozenset:
    # Building blocks of rule (ii): the n=1 seed or any rule (i) product.
    if length == 1:
        return frozenset({"1"})
    return _zero_wrapped(length)


@lru_cache(maxsize=None)
def _chains_ending_in_atom(length: int) -> frozenset:
    """Alternating words  atom (bit atom)*  of the given total length."""
    out = set()
    for alen in range(1, length + 1, 2):
        for atom in _atoms(alen):
            if alen == length:
                out.add(atom)
            else:
                for prefix in _chains_ending_in_atom(length - alen - 1):
                    out.add(prefix + "0" + atom)
                    out.add(prefix + "1" + atom)
    return frozenset(out)


def _compositions(n: int) -> set:
    """Rule (ii): sandwich arbitrary bits between two or more atoms.

    Duplicate constructions collapse under set semantics; the oracle is the
    ground truth the result is tested against.
    """
    return {s for s in _chains_ending_in_atom(n) if s not in _atoms(n)}


def rule_based_sequences(n: int) -> frozenset:
    """Successful sequences generated by the two construction rules."""
    if n < 1 or n % 2 == 0:
        raise ValueError("n must be an odd integer >= 1")
    return _successful_by_rules(n)


def success_probability_closed(n: int, theta: float) -> float:
    """Closed-form success probability C(n,(n+1)/2) cos^(n+1)(theta/2) / 2^n."""
    if n < 1 or n % 2 == 0:
        raise ValueError("n must be an odd integer >= 1")
    return math.comb(n, (n + 1) // 2) / (1 << n) * math.cos(theta / 2.0) ** (n + 1)


def success_probability_asymptotic(n: int, theta: float) -> float:
    """Stirling approximation sqrt(2/(pi n)) cos^(n+1)(theta/2)."""
    if n < 1 or n % 2 == 0:
        raise ValueError("n must be an odd integer >= 1")
    return math.sqrt(2.0 / (math.pi * n)) * math.cos(theta / 2.0) ** (n + 1)


def branch_probabilities(n: int, theta: float, input_state="+") -> dict:
    """Exact branch probability of every outcome sequence for one input."""
    tens = branch_tensor(build_imperfect_chain(input_state, n, theta))
    probs = np.einsum("amb,amb->m", tens, tens.conj()).real
    return {format(m, f"0{n}b"): float(probs[m]) for m in range(1 << n)}


def oracle_success_probability(n: int, theta: float, input_state="+") -> float:
    """Sum of exact branch probabilities over the oracle's success set."""
    probs = branch_probabilities(n, theta, input_state)
    return sum(probs[s] for s in enumerate_success_sequences(n))


def run_protocol(
    spec: ProtocolSpec,
    input_state,
    outcomes=None,
    rng: np.random.Generator | None = None,
) -> ProtocolRun:
    """Execute one protocol instance, measuring the middles left to right.

    ``outcomes`` forces the full sequence (string or OutcomeSequence);
    otherwise outcomes are sampled from ``rng``.  Success is decided by
    membership in the oracle's success set, never by a hardcoded list.
    """
    chain = build_imperfect_chain(input_state, spec.n, spec.theta, spec.entangler)
    return _measure_middles(spec, chain, outcomes, rng)


def _measure_middles(spec, chain, outcomes, rng) -> ProtocolRun:
    n = spec.n
    forced = None
    if outcomes is not None:
        forced = str(outcomes)
        if len(forced) != n or set(forced) - {"0", "1"}:
            raise ValueError(f"forced outcome sequence must be {n} bits")
    bits = []
    path_probability = 1.0
    for i in range(n):
        rec, chain = measure(
            chain,
            i + 1,
            basis="xi",
            xi=0.0,
            outcome=None if forced is None else int(forced[i]),
            rng=rng,
        )
        bits.append(rec.outcome)
        path_probability *= rec.probability
    seq = OutcomeSequence(tuple(bits))
    success = str(seq) in enumerate_success_sequences(n)
    end_pair = extract_qubits(chain, [0, n + 1])
    return ProtocolRun(spec, seq, success, end_pair, path_probability)


# ---------------------------------------------------------------------------
# Teleportation

def teleport_target(input_state, xi: float, m: int) -> PureState:
    """Ideal one-bit teleport output ``X^m H Rz(xi) psi``."""
    out = PureState(1, _input_pair(input_state))
    apply_gate(out, 0, "RZ", xi)
    apply_gate(out, 0, "H")
    if m:
        apply_gate(out, 0, "X")
    return out


def one_bit_teleport(
    input_state,
    xi: float,
    theta: float,
    outcome: int | None = None,
    rng: np.random.Generator | None = None,
) -> tuple[sv.MeasurementRecord, PureState]:
    """One-bit teleportation across a single imperfect controlled-phase link.

    At theta = 0 the output is exactly ``X^m H Rz(xi) psi``; otherwise it is
    the distorted state the link produces, which no input-independent unitary
    can repair.
    """
    state = init_register([_input_pair(input_state), "+"])
    apply_controlled_phase(state, 0, 1, math.pi + theta, "CS")
    rec, state = measure(state, 0, basis="xi", xi=xi, outcome=outcome, rng=rng)
    return rec, extract_qubits(state, [1])


def teleport_infidelity_exact(input_state, theta: float) -> float:
    """Outcome-weighted teleport infidelity of one input, branch by branch.

    Runs both forced branches through the simulator; used as the slow
    reference the vectorized Monte-Carlo loop is tested against.
    """
    infidelity = 1.0
    for m in (0, 1):
        try:
            rec, out = one_bit_teleport(input_state, 0.0, theta, outcome=m)
        except ForcedOutcomeError:
            continue
        target = teleport_target(input_state, 0.0, m)
        infidelity -= rec.probability * fidelity_up_to_global_phase(out, target)
    return infidelity


def average_teleport_infidelity(theta: float, sample_count: int, seed: int) -> float:
    """Monte-Carlo infidelity of one-bit teleportation over Haar inputs.

    Both measurement branches are enumerated exactly for each sample and
    weighted by their Born probabilities, so sampling noise comes only from
    the Haar draw.  Converges to sin^2(theta/2) / 2, independently of the
    measurement-basis angle (fixed to 0 here).
    """
    if sample_count < 1:
        raise ValueError("sample_count must be >= 1")
    rng = np.random.default_rng(seed)
    raw = rng.normal(size=(sample_count, 2)) + 1j * rng.normal(size=(sample_count, 2))
    psi = raw / np.linalg.norm(raw, axis=1, keepdims=True)
    a, b = psi[:, 0], psi[:, 1]

    # chain = CS_(pi+theta) (psi ⊗ |+>); a Hadamard on qubit 0 turns its two
    # index values into the sigma_x outcome, exactly as measure() would.
    phase = np.exp(1j * (math.pi + theta))
    u0 = np.stack([a + b, a + phase * b], axis=1) * 0.5    # outcome 0, unnormalized
    u1 = np.stack([a - b, a - phase * b], axis=1) * 0.5
    t0 = np.stack([a + b, a - b], axis=1) * _INV_SQRT2     # H psi
    t1 = np.stack([a - b, a + b], axis=1) * _INV_SQRT2     # X H psi
    # |<t_m|u_m>|^2 with u unnormalized equals p_m * fidelity_m
    fid = (
        np.abs(np.einsum("sk,sk->s", t0.conj(), u0)) ** 2
        + np.abs(np.einsum("sk,sk->s", t1.conj(), u1)) ** 2
    )
    return float(np.mean(1.0 - fid))


@dataclass
class StochasticTeleportRun:
    success: bool
    m1: int | None
    output: PureState | None
    protocol: ProtocolRun


def stochastic_teleport_target(input_state, xi: float, m1: int) -> PureState:
    """Heralded teleport output ``Z^(1-m1) Rz(xi) psi``."""
    out = PureState(1, _input_pair(input_state))
    apply_gate(out, 0, "RZ", xi)
    if (1 - m1) % 2:
        apply_gate(out, 0, "Z")
    return out


def stochastic_teleport(
    input_state,
    xi: float,
    theta: float,
    outcomes=None,
    rng: np.random.Generator | None = None,
) -> StochasticTeleportRun:
    """Heralded perfect teleportation via the n=1 protocol.

    ``outcomes`` may force ``(m2, m1)``.  On success the third qubit holds
    ``Z^(1-m1) Rz(xi) psi`` with fidelity 1 for any theta.
    """
    forced_m2 = forced_m1 = None
    if outcomes is not None:
        forced_m2, forced_m1 = outcomes
    spec = ProtocolSpec(1, theta)
    chain = build_imperfect_chain(input_state, 1, theta)
    rec2, chain = measure(chain, 1, basis="xi", xi=0.0, outcome=forced_m2, rng=rng)
    seq = OutcomeSequence((rec2.outcome,))
    success = str(seq) in enumerate_success_sequences(1)
    if not success:
        run = ProtocolRun(spec, seq, False, extract_qubits(chain, [0, 2]), rec2.probability)
        return StochasticTeleportRun(False, None, None, run)
    rec1, chain = measure(chain, 0, basis="xi", xi=xi, outcome=forced_m1, rng=rng)
    run = ProtocolRun(spec, seq, True, extract_qubits(chain, [0, 2]), rec2.probability)
    return StochasticTeleportRun(True, rec1.outcome, extract_qubits(chain, [2]), run)


# ---------------------------------------------------------------------------
# Fail and retry

def retry_protocol(
    end_pair: PureState,
    n: int,
    theta: float,
    outcomes=None,
    rng: np.random.Generator | None = None,
) -> ProtocolRun:
    """Re-run the protocol between two held end qubits in an arbitrary joint state.

    Fresh ``|+>`` middles are inserted, the whole chain is re-entangled, and
    the middles are measured.  A successful sequence of weight q leaves the
    ends in ``(alpha|00> + (-1)^q delta|11>) / sqrt(|alpha|^2 + |delta|^2)``
    regardless of how many earlier attempts failed.
    """
    if end_pair.num_qubits != 2:
        raise ValueError("end pair must be a 2-qubit state")
    a00, a11 = end_pair.amps[0], end_pair.amps[3]
    if abs(a00) ** 2 + abs(a11) ** 2 < 1e-12:
        raise DegenerateInputError(
            "no |00>/|11> amplitude left on the end pair; success is impossible"
        )
    spec = ProtocolSpec(n, theta)
    chain = sv.embed_pair_with_plus_middles(end_pair, n)
    entangle_chain(chain, theta, "CSX")
    return _measure_middles(spec, chain, outcomes, rng)


def _retry_branch_maps(n: int, theta: float) -> np.ndarray:
    """Diagonal action of each outcome sequence on the end-pair amplitudes.

    Measuring the middles maps the joint end amplitudes elementwise:
    ``psi'[a, b] = psi[a, b] * g[m, a, b] / 2**n`` for outcome sequence m,
    because basis ends stay basis ends under the diagonal entanglers.  The
    factors are read off by running the chain on the four basis end pairs.
    """
    g = np.empty((1 << n, 2, 2), dtype=complex)
    for a in (0, 1):
        for b in (0, 1):
            pair = PureState(2, np.eye(4, dtype=complex)[2 * a + b])
            chain = sv.embed_pair_with_plus_middles(pair, n)
            entangle_chain(chain, theta, "CSX")
            tens = branch_tensor(chain)
            # sanity: the off-diagonal end components must vanish
            other = tens.copy()
            other[a, :, b] = 0.0
            if np.max(np.abs(other)) > 1e-12:
                raise AssertionError("retry branch map is not diagonal")
            g[:, a, b] = tens[a, :, b] * (1 << n)
    return g


def retry_probabilities(
    n: int,
    theta: float,
    max_failures: int,
    path_cutoff: float = 1e-15,
) -> tuple[list, float]:
    """Exact success probabilities after N = 0..max_failures consecutive failures.

    Starting from a fresh ``|+>|+>`` end pair, every failure history is
    enumerated (no sampling); histories are merged whenever they land on the
    same end-pair ray, which keeps the level populations polynomial.  Paths
    below ``path_cutoff`` probability are dropped.  Returns the list of
    P_n^N values and their partial sum.
    """
    if max_failures < 0:
        raise ValueError("max_failures must be >= 0")
    g = _retry_branch_maps(n, theta).reshape(1 << n, 4)
    success = sorted(int(s, 2) for s in enumerate_success_sequences(n))
    failure = [m for m in range(1 << n) if m not in set(success)]
    g_succ = g[success]  # (S, 4)
    g_fail = g[failure]  # (F, 4)
    scale = 1.0 / (1 << (2 * n))

    # level state: unit rays (R, 4) with path-probability weights (R,)
    rays = np.array([[0.5, 0.5, 0.5, 0.5]], dtype=complex)
    weights = np.array([1.0])

    probs = []
    for _ in range(max_failures + 1):
        if rays.size == 0:
            probs.append(0.0)
            continue
        succ_amp = rays[:, None, :] * g_succ[None, :, :]
        p_succ = np.einsum("rsk,rsk->r", succ_amp, succ_amp.conj()).real * scale
        probs.append(float(np.dot(weights, p_succ)))

        children = rays[:, None, :] * g_fail[None, :, :]
        child_norm2 = np.einsum("rfk,rfk->rf", children, children.conj()).real * scale
        child_w = (weights[:, None] * child_norm2).reshape(-1)
        children = children.reshape(-1, 4)
        keep = child_w > path_cutoff
        children, child_w = children[keep], child_w[keep]
        rays, weights = _merge_rays(children, child_w)
    return probs, float(sum(probs))


def _merge_rays(states: np.ndarray, weights: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Merge states on the same ray; future statistics only depend on the ray."""
    if states.size == 0:
        return states.reshape(0, 4), weights
    norms = np.sqrt(np.einsum("rk,rk->r", states, states.conj()).real)
    units = states / norms[:, None]
    lead = np.argmax(np.abs(units), axis=1)
    phase = units[np.arange(len(units)), lead]
    units = units * (phase.conj() / np.abs(phase))[:, None]
    merged: dict = {}
    for u, w in zip(units, weights):
        key = tuple(np.round(u.view(float), 9))
        if key in merged:
            merged[key][1] += w
        else:
            merged[key] = [u, w]
    out_rays = np.array([v[0] for v in merged.values()])
    out_w = np.array([v[1] for v in merged.values()])
    return out_rays, out_w


def retry_probability_closed_n1(theta: float, n_failures: int) -> float:
    """Exact n=1 value cos^2(theta/2) sin^(2N)(theta/2) / 2, used as an oracle."""
    c2 = math.cos(theta / 2.0) ** 2
    s2 = math.sin(theta / 2.0) ** 2
    return 0.5 * c2 * s2**n_failures


# ---------------------------------------------------------------------------
# GHZ concatenation

@dataclass
class GhzRun:
    state: PureState          # unmeasured qubits, byproducts already corrected
    z_corrections: tuple      # (qubit index in the reduced register, parity)
    protocol_attempts: int
    restarts: int


def concatenated_ghz(
    N: int,
    theta: float,
    rng: np.random.Generator | None = None,
    force_success: bool = False,
    retry_cap: int = 100_000,
) -> GhzRun:
    """Chain 2(N-1) successful n=1 protocols into a (2N-1)-qubit GHZ state.

    The register holds 4N-3 qubits; every odd qubit is a protocol middle.
    Failures are retried by re-initializing the middle and re-entangling,
    which never disturbs the amplitude ratio of the qubits already linked.
    When retrying becomes hopeless (the success amplitude of the link decays
    to zero) the whole register is rebuilt from scratch.  Each successful
    link records a Z byproduct on its output qubit; the returned state has
    the recorded corrections applied.
    """
    if N < 2:
        raise ValueError("N must be >= 2")
    links = 2 * (N - 1)
    total = 2 * links + 1
    if force_success:
        rng = None
    elif rng is None:
        raise ValueError("need an rng unless force_success is set")

    attempts = 0
    restarts = 0
    while True:
        state = init_register(["+"] * total)
        parities = []
        aborted = False
        for k in range(links):
            left, mid, right = 2 * k, 2 * k + 1, 2 * k + 2
            parity = 0
            while True:
                attempts += 1
                if attempts > retry_cap:
                    raise RetryLimitError("GHZ retry cap exhausted")
                apply_controlled_phase(state, left, mid, math.pi + theta, "CSX")
                apply_controlled_phase(state, mid, right, math.pi + theta, "CSX")
                if force_success:
                    outcome = 1
                else:
                    _, p1 = sv.measurement_probabilities(state, mid, "xi", 0.0)
                    if p1 < 1e-9:
                        aborted = True  # link is dead; rebuild everything
                        break
                    outcome = None
                rec, state = measure(state, mid, basis="xi", xi=0.0, outcome=outcome, rng=rng)
                parity ^= rec.outcome
                if rec.outcome == 1:
                    break
                sv.reset_qubits(state, {mid: "+"})
            if aborted:
                break
            parities.append((right, parity))
        if aborted:
            restarts += 1
            continue
        reduced = extract_qubits(state, list(range(0, total, 2)))
        corrections = tuple((q // 2, p) for q, p in parities)
        for q, p in corrections:
            if p % 2:
                apply_gate(reduced, q, "Z")
        return GhzRun(reduced, corrections, attempts, restarts)


def ghz_target(num_qubits: int) -> PureState:
    """(|0...0> + |1...1>)/sqrt(2)."""
    amps = np.zeros(1 << num_qubits, dtype=complex)
    amps[0] = amps[-1] = _INV_SQRT2
    return PureState(num_qubits, amps)
