"""Command-line front end: verification suites, sweeps, result persistence.

All randomness flows from one ``--seed`` flag; per-trial generators are
seeded with ``[seed, stream, index]`` entropy tuples, so identical configs
reproduce byte-identical output files under any execution order.

Exit codes: 0 success, 1 verification failure, 2 invalid arguments.
CSV output is comma-separated with a header row, LF line endings, and floats
printed at 12 significant digits.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import dataclass

import numpy as np

from . import growth as gr
from . import protocol as pr
from . import statevector as sv

_PUBLISHED_T1D = "23*l_C"     # published shorthand for the 1D time cost
_PUBLISHED_T2D = "65*N+10"    # published shorthand for the 2D time cost


@dataclass
class RunConfig:
    command: str
    n: int = 3
    theta: float = 0.3
    trials: int = 1000
    seed: int = 12345
    out: str | None = None
    fmt: str = "csv"

    def validate(self):
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        if self.n < 1 or self.n % 2 == 0:
            raise ValueError("n must be odd and >= 1")


def _fmt(value) -> str:
    if isinstance(value, float):
        return f"{value:.12g}"
    return str(value)


def _emit(rows: list[dict], config: RunConfig) -> str:
    """Render rows (list of ordered dicts) as CSV or JSON text."""
    if config.fmt == "json":
        return json.dumps(rows, indent=1, sort_keys=False) + "\n"
    if not rows:
        return "\n"
    header = list(rows[0].keys())
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(_fmt(row[k]) for k in header))
    return "\n".join(lines) + "\n"


def _write(text: str, config: RunConfig):
    if config.out:
        with open(config.out, "w", newline="") as fh:
            fh.write(text)
    sys.stdout.write(text)


def _provenance(config: RunConfig) -> dict:
    return {"n": config.n, "theta": config.theta, "seed": config.seed, "trials": config.trials}


# ---------------------------------------------------------------------------
# Subcommands

def cmd_sequences(config: RunConfig) -> int:
    """Print heralded-success sequences from the oracle and the rule generator."""
    oracle = pr.enumerate_success_sequences(config.n)
    rules = pr.rule_based_sequences(config.n)
    rows = []
    for seq in sorted(oracle | rules):
        rows.append(
            {
                **_provenance(config),
                "sequence": seq,
                "hamming_weight": seq.count("1"),
                "in_oracle": int(seq in oracle),
                "in_rules": int(seq in rules),
            }
        )
    _write(_emit(rows, config), config)
    if oracle != rules:
        print("MISMATCH: rule-based generator disagrees with the oracle", file=sys.stderr)
        return 1
    print(f"# {len(oracle)} sequences, generator matches oracle", file=sys.stderr)
    return 0


def cmd_protocol_stats(config: RunConfig, theta_grid) -> int:
    """Closed-form vs enumerated success probability over a theta grid."""
    rows = []
    worst = 0.0
    for theta in theta_grid:
        closed = pr.success_probability_closed(config.n, theta)
        oracle = pr.oracle_success_probability(config.n, theta)
        asym = pr.success_probability_asymptotic(config.n, theta)
        worst = max(worst, abs(closed - oracle))
        rows.append(
            {
                **{**_provenance(config), "theta": theta},
                "p_closed": closed,
                "p_oracle": oracle,
                "p_asymptotic": asym,
            }
        )
    _write(_emit(rows, config), config)
    if worst > 1e-10:
        print(f"MISMATCH: closed form vs oracle differ by {worst:.3e}", file=sys.stderr)
        return 1
    return 0


def cmd_retry(config: RunConfig, max_failures: int) -> int:
    """Exact success probabilities after N consecutive failures."""
    probs, total = pr.retry_probabilities(config.n, config.theta, max_failures)
    rows = []
    running = 0.0
    for k, prob in enumerate(probs):
        running += prob
        rows.append(
            {
                **_provenance(config),
                "failures_before_success": k,
                "probability": prob,
                "cumulative": running,
            }
        )
    _write(_emit(rows, config), config)
    print(f"# cumulative after {max_failures} failures: {total:.9f}", file=sys.stderr)
    return 0


def cmd_grow(config: RunConfig, mode: str, target_length: int, size: int) -> int:
    """Monte-Carlo growth statistics against the closed-form cost model."""
    p = pr.success_probability_closed(config.n, config.theta)
    ell = 3
    s_a = gr.expected_pair_prep_attempts(p)
    s_b = gr.expected_three_node_protocols(p)
    gain = gr.expected_length_gain(p, ell)

    if mode == "1d":
        cost = gr.CostModel(p, ell, config.n)
        totals = {"apps": 0, "prep": 0, "growth": 0, "units": 0, "len": 0, "gain_sum": 0.0, "gain_pairs": 0}
        for i in range(config.trials):
            rng = np.random.default_rng([config.seed, 10, i])
            _, st = gr.grow_1d(target_length, cost, rng)
            totals["apps"] += st.protocol_applications
            totals["prep"] += st.prep_rounds
            totals["growth"] += st.growth_attempts
            totals["units"] += st.three_nodes_built
            totals["len"] += st.final_length
            totals["gain_sum"] += st.paired_gain_sum
            totals["gain_pairs"] += st.paired_gain_pairs
        s_a_mc = gr.mc_pair_prep_attempts(p, config.trials, config.seed)
        s_b_mc = totals["prep"] / totals["units"]
        gain_mc = totals["gain_sum"] / totals["gain_pairs"]
        per_len_model_mc = (s_b_mc + 1.0) / gain_mc
        per_len_model = (s_b + 1.0) / gain
        t1d_formula = gr.time_steps_1d(1.0, p, ell)  # per unit length
        row = {
            **_provenance(config),
            "p": p,
            "target_length": target_length,
            "s_a_formula": s_a,
            "s_a_mc": s_a_mc,
            "s_b_formula": s_b,
            "s_b_mc": s_b_mc,
            "length_gain_formula": gain,
            "length_gain_mc": gain_mc,
            "protocols_per_length_formula": per_len_model,
            "protocols_per_length_mc": per_len_model_mc,
            "protocols_per_length_raw": totals["apps"] / totals["len"],
            "t1d_per_length_formula": t1d_formula,
            "t1d_per_length_published": _PUBLISHED_T1D,
            "note": "published shorthand differs from the displayed formula; both reported",
        }
        _write(_emit([row], config), config)
        # the displayed formulas must agree with their own direct evaluation
        if abs(t1d_formula - 5.0 * per_len_model) > 1e-3 * t1d_formula:
            print("MISMATCH: 1D time formula drifted from its own evaluation", file=sys.stderr)
            return 1
        return 0

    # 2d
    t2d_formula_coeff = (gr.time_steps_2d(size, p, ell) - 10.0) / size
    ok_trials = 0
    overhead = 0.0
    apps = 0
    for i in range(config.trials):
        rng = np.random.default_rng([config.seed, 20, i])
        graph, st = gr.grow_2d(size, config.n, config.theta, rng)
        ok_trials += 1
        overhead += st.physical_qubits_used / (size * size)
        apps += st.protocol_applications
    row = {
        **_provenance(config),
        "p": p,
        "grid": size,
        "grids_completed": ok_trials,
        "mean_protocol_applications": apps / config.trials,
        "mean_overhead_per_qubit": overhead / config.trials,
        "overhead_reference": 4 * (config.n + 1) ** 2,
        "t2d_formula": f"{_fmt(t2d_formula_coeff)}*N+10",
        "t2d_published": _PUBLISHED_T2D,
        "note": "published shorthand differs from the displayed formula; both reported",
    }
    _write(_emit([row], config), config)
    expected_coeff = 10.0 / (p * gr.expected_length_gain(p, ell)) * (gr.expected_three_node_protocols(p) + 1.0)
    if abs(t2d_formula_coeff - expected_coeff) > 1e-3 * expected_coeff:
        print("MISMATCH: 2D time formula drifted from its own evaluation", file=sys.stderr)
        return 1
    return 0


def cmd_pipeline13(config: RunConfig, retry_cap: int) -> int:
    """Run the 13-qubit demonstration pipeline and report fidelities."""
    rows = []
    worst = 1.0
    for i in range(config.trials):
        rng = np.random.default_rng([config.seed, 30, i])
        state, st = gr.run_thirteen_qubit_pipeline(config.theta, rng, retry_cap=retry_cap)
        reduced = sv.extract_qubits(state, [0, 4, 8, 12])
        fid = sv.fidelity_up_to_global_phase(reduced, gr.three_node_target())
        worst = min(worst, fid)
        rows.append(
            {
                **_provenance(config),
                "trial": i,
                "fidelity": fid,
                "protocol_applications": st.protocol_applications,
                "time_steps": st.time_steps,
                "restarts": st.restarts,
            }
        )
    _write(_emit(rows, config), config)
    if worst < 1.0 - 1e-9:
        print(f"MISMATCH: worst pipeline fidelity {worst!r}", file=sys.stderr)
        return 1
    return 0


def _check(name: str, ok: bool, detail: str, failures: list, lines: list):
    status = "PASS" if ok else "FAIL"
    lines.append(f"{status} {name}: {detail}")
    if not ok:
        failures.append(name)


def verify(seed: int = 12345, corrupt_gate: bool = False, out: str | None = None) -> int:
    """Run the cross-module invariant suite; returns a process exit code.

    ``corrupt_gate`` injects a small phase error into every Hadamard for the
    duration of the run; the suite must then fail (negative control).
    """
    failures: list[str] = []
    lines: list[str] = []
    old_tamper = sv.GATE_TAMPER
    sv.GATE_TAMPER = 1e-3 if corrupt_gate else 0.0
    try:
        pr.enumerate_success_sequences.cache_clear()
        pr._successful_by_rules.cache_clear()
        pr._zero_wrapped.cache_clear()
        pr._chains_ending_in_atom.cache_clear()

        for n, expected in ((1, {"1"}), (3, {"010", "101", "111"})):
            got = set(pr.enumerate_success_sequences(n))
            _check(f"oracle_n{n}", got == expected, f"{sorted(got)}", failures, lines)
        for n in (1, 3, 5):
            ok = pr.rule_based_sequences(n) == pr.enumerate_success_sequences(n)
            _check(f"rules_equal_oracle_n{n}", ok, f"n={n}", failures, lines)

        worst = 0.0
        for n in (1, 3, 5):
            for theta in (0.0, 0.3, 1.0, 2.5):
                worst = max(
                    worst,
                    abs(
                        pr.oracle_success_probability(n, theta)
                        - pr.success_probability_closed(n, theta)
                    ),
                )
        _check("probability_closed_form", worst < 1e-10, f"max deviation {worst:.3e}", failures, lines)

        # norm preservation and entangler identity on random states
        rng = np.random.default_rng(seed)
        raw = rng.normal(size=8) + 1j * rng.normal(size=8)
        state = sv.PureState(3, raw / np.linalg.norm(raw))
        for q, gate in ((0, "H"), (1, "X"), (2, "Z"), (1, "H")):
            sv.apply_gate(state, q, gate)
        sv.apply_controlled_phase(state, 0, 2, 0.77, "CSX")
        _check(
            "norm_preservation",
            abs(state.norm_squared() - 1.0) < 1e-12,
            f"|norm^2 - 1| = {abs(state.norm_squared() - 1.0):.2e}",
            failures,
            lines,
        )
        a = sv.init_register([(0.6, 0.8j), "+"])
        b = a.copy()
        sv.apply_controlled_phase(a, 0, 1, 1.234, "CSX")
        sv.apply_gate(b, 1, "X")
        sv.apply_controlled_phase(b, 0, 1, 1.234, "CS")
        sv.apply_gate(b, 1, "X")
        _check(
            "csx_identity",
            bool(np.max(np.abs(a.amps - b.amps)) < 1e-12),
            "CSX == (I x X) CS (I x X)",
            failures,
            lines,
        )

        # teleportation: exact at theta = 0, heralded branch perfect at any theta
        ok = True
        for m in (0, 1):
            _, out_state = pr.one_bit_teleport((0.6, 0.8j), 0.9, 0.0, outcome=m)
            ok &= bool(
                sv.fidelity_up_to_global_phase(out_state, pr.teleport_target((0.6, 0.8j), 0.9, m))
                > 1.0 - 1e-12
            )
        run = pr.stochastic_teleport((0.6, 0.8j), 0.4, 0.8, outcomes=(1, 0))
        ok &= bool(
            sv.fidelity_up_to_global_phase(
                run.output, pr.stochastic_teleport_target((0.6, 0.8j), 0.4, 0)
            )
            > 1.0 - 1e-10
        )
        _check("teleportation", ok, "ideal and heralded outputs", failures, lines)

        est = pr.average_teleport_infidelity(0.3, 20000, seed)
        target = 0.5 * math.sin(0.15) ** 2
        se = math.sin(0.15) ** 2 / math.sqrt(12.0) / math.sqrt(20000)
        _check(
            "teleport_infidelity_mc",
            abs(est - target) < 4 * se,
            f"{est:.6f} vs {target:.6f}",
            failures,
            lines,
        )

        probs, total = pr.retry_probabilities(1, 0.7, 10)
        exact = [pr.retry_probability_closed_n1(0.7, k) for k in range(11)]
        dev = max(abs(x - y) for x, y in zip(probs, exact))
        _check("retry_exact_n1", dev < 1e-12, f"max deviation {dev:.2e}", failures, lines)

        ghz = pr.concatenated_ghz(3, 0.7, rng=np.random.default_rng([seed, 1]))
        fid = sv.fidelity_up_to_global_phase(ghz.state, pr.ghz_target(5))
        _check("ghz_concatenation", fid > 1.0 - 1e-10, f"fidelity {fid:.12f}", failures, lines)

        for theta in (0.0, 0.3, 1.0, 2.5):
            state, _ = gr.run_thirteen_qubit_pipeline(theta, np.random.default_rng([seed, 2, int(theta * 10)]))
            reduced = sv.extract_qubits(state, [0, 4, 8, 12])
            fid = sv.fidelity_up_to_global_phase(reduced, gr.three_node_target())
            _check(f"pipeline_theta_{theta}", fid > 1.0 - 1e-9, f"fidelity {fid:.12f}", failures, lines)

        graph, _ = gr.grow_2d(2, 3, 0.3, np.random.default_rng([seed, 3]))
        _check(
            "grow2d_minimal",
            len(graph.nodes) == 4 and graph.edge_count() == 4,
            f"{len(graph.nodes)} nodes, {graph.edge_count()} edges",
            failures,
            lines,
        )
    finally:
        sv.GATE_TAMPER = old_tamper
        pr.enumerate_success_sequences.cache_clear()

    lines.append(f"{'FAIL' if failures else 'PASS'} overall: {len(failures)} failing checks")
    text = "\n".join(lines) + "\n"
    if out:
        with open(out, "w", newline="") as fh:
            fh.write(text)
    sys.stdout.write(text)
    return 1 if failures else 0


# ---------------------------------------------------------------------------
# Argument parsing

def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="clusterforge",
        description="Distill perfect cluster states from imperfect global entangling gates.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--n", type=int, default=3, help="odd middle-qubit count")
        p.add_argument("--theta", type=str, default="0.3", help="systematic phase error (radians)")
        p.add_argument("--trials", type=int, default=1000)
        p.add_argument("--seed", type=int, default=12345)
        p.add_argument("--out", type=str, default=None, help="output file path")
        p.add_argument("--format", dest="fmt", choices=("csv", "json"), default="csv")
        p.add_argument("--max-qubits", type=int, default=None, help="dense register cap")

    p = sub.add_parser("sequences", help="heralded success sequences: oracle vs rules")
    common(p)

    p = sub.add_parser("protocol-stats", help="success probability: closed form vs oracle")
    common(p)

    p = sub.add_parser("retry", help="exact fail-and-retry success probabilities")
    common(p)
    p.add_argument("--max-failures", type=int, default=25)

    p = sub.add_parser("grow", help="Monte-Carlo growth vs the closed-form cost model")
    common(p)
    p.add_argument("--mode", choices=("1d", "2d"), default="1d")
    p.add_argument("--target-length", type=int, default=100)
    p.add_argument("--size", type=int, default=3, help="grid side for 2d mode")

    p = sub.add_parser("pipeline13", help="thirteen-qubit selective-entanglement pipeline")
    common(p)
    p.add_argument("--retry-cap", type=int, default=10_000)

    p = sub.add_parser("verify", help="run the invariant suite (exit 0 iff all pass)")
    common(p)
    p.add_argument("--corrupt-gate", action="store_true", help=argparse.SUPPRESS)

    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)

    thetas = [float(t) for t in str(args.theta).split(",") if t != ""]
    config = RunConfig(
        command=args.command,
        n=args.n,
        theta=thetas[0],
        trials=args.trials,
        seed=args.seed,
        out=args.out,
        fmt=args.fmt,
    )
    try:
        config.validate()
    except ValueError as exc:
        parser.error(str(exc))  # exits 2
    if args.max_qubits is not None:
        if args.max_qubits < 1:
            parser.error("--max-qubits must be positive")
        sv.MAX_QUBITS = args.max_qubits

    try:
        if args.command == "sequences":
            return cmd_sequences(config)
        if args.command == "protocol-stats":
            grid = thetas if len(thetas) > 1 else [0.0, 0.3, 1.0, 2.5]
            return cmd_protocol_stats(config, grid)
        if args.command == "retry":
            return cmd_retry(config, args.max_failures)
        if args.command == "grow":
            return cmd_grow(config, args.mode, args.target_length, args.size)
        if args.command == "pipeline13":
            return cmd_pipeline13(config, args.retry_cap)
        if args.command == "verify":
            return verify(seed=config.seed, corrupt_gate=args.corrupt_gate, out=config.out)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    parser.error("unknown command")
    return 2


if __name__ == "__main__":
    sys.exit(main())
