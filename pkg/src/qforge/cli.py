"""
Command-line entry point.

Exit codes: 0 on success or all PASS, 1 on test failures or a false
verification, 2 when the input or invocation is invalid.
"""
from __future__ import annotations

import argparse
import json
import math
import os
import sys
from pathlib import Path
from typing import Sequence

from . import analysis, library, qasm, sim
from .ir import CircuitError, GateKind, count_ops, gate_loc
from .testkit import mutate, planning, runners, swap, vectors

EXIT_OK, EXIT_FAIL, EXIT_ERROR = 0, 1, 2


class UsageError(Exception):
    pass


def _default_seed() -> int:
    raw = os.environ.get("QFORGE_SEED")
    if raw is None:
        return 0
    try:
        return int(raw)
    except ValueError:
        raise UsageError(f"QFORGE_SEED must be an integer, got {raw!r}") from None


def _emit(args, payload: dict, text: str) -> None:
    if getattr(args, "json", False):
        print(json.dumps(payload, indent=2))
    else:
        print(text, end="" if text.endswith("\n") else "\n")


def _write_or_print(path: str | None, text: str) -> None:
    if path:
        Path(path).write_text(text)
    else:
        print(text, end="" if text.endswith("\n") else "\n")


def _spec_from_expect(expect: str) -> library.SubroutineSpec:
    # kind:n or kind:n:k (dicke) or kind:n:phase (qpe)
    parts = expect.split(":")
    kind = parts[0].lower()
    try:
        n = int(parts[1]) if len(parts) > 1 else 1
        extra = parts[2] if len(parts) > 2 else None
    except ValueError:
        raise UsageError(f"bad --expect value {expect!r}; use kind:n") from None
    if kind == "dicke":
        return library.SubroutineSpec(kind, n, k=int(extra) if extra else None)
    if kind == "qpe":
        return library.SubroutineSpec(kind, n, phase=float(extra) if extra else 0.0)
    return library.SubroutineSpec(kind, n)


# -- commands ---------------------------------------------------------------


def cmd_slice(args) -> int:
    circuit = qasm.parse_file(args.file)
    stem = Path(args.file).stem
    out_dir = Path(args.out_dir) if args.out_dir else Path(args.file).parent
    out_dir.mkdir(parents=True, exist_ok=True)
    slices = analysis.vslice(circuit, args.mode)
    entries = []
    for k, piece in enumerate(slices, start=1):
        entry = {"index": k, "file": f"{stem}.slice{k}.qasm", "num_qubits": piece.num_qubits}
        if args.strip_idle:
            red = analysis.hslice(piece)
            piece = red.reduced
            entry.update(num_qubits=piece.num_qubits, kept_qubits=red.kept_qubits,
                         removed_qubits=red.removed_qubits)
        qasm.write_file(piece, out_dir / entry["file"])
        entries.append(entry)
    manifest = {"source": str(args.file), "mode": args.mode, "cut_positions": slices.cut_positions,
                "slices": entries}
    manifest_path = out_dir / f"{stem}.slices.json"
    manifest_path.write_text(json.dumps(manifest, indent=2) + "\n")
    text = "\n".join(str(out_dir / e["file"]) for e in entries) + f"\nmanifest: {manifest_path}"
    _emit(args, manifest, text)
    return EXIT_OK


def cmd_test(args) -> int:
    circuit = qasm.parse_file(args.file)
    cases = vectors.load(args.vectors)
    seed = args.seed
    if args.mode == "pclass":
        report = runners.p_class_tester(circuit, cases)
    else:
        report = runners.f_quant_tester(circuit, cases, args.tolerance, shots=args.shots, seed=seed)
    text = report.render()
    if args.shots is not None:
        text += f"seed: {seed}\n"
    _emit(args, {**report.to_json(), "seed": seed}, text)
    return EXIT_OK if report.passed else EXIT_FAIL


def cmd_categorize(args) -> int:
    circuit = qasm.parse_file(args.file)
    cat = analysis.categorize(circuit, args.max_unitary_qubits)
    payload = {"verdict": cat.verdict.value, "method": cat.method, "monomial": cat.monomial, "notes": cat.notes}
    text = f"{cat.verdict.value} ({cat.method})"
    if cat.monomial:
        text += " monomial"
    if cat.notes:
        text += ": " + "; ".join(cat.notes)
    _emit(args, payload, text)
    return EXIT_OK


def cmd_locate(args) -> int:
    circuit = qasm.parse_file(args.file)
    qubits = [q.strip() for q in args.qubits.split(",")] if args.qubits else None
    hits = gate_loc(circuit, args.gate, [int(q) if q.isdigit() else q for q in qubits] if qubits else None)
    payload = {"gate": GateKind.parse(args.gate).value, "count": len(hits),
               "locations": [{"index": i, "origin": s.origin, "line": s.line, "column": s.column,
                              "op": str(circuit.ops[i])} for i, s in hits]}
    lines = [f"{i}: {circuit.ops[i]}  at {s}" for i, s in hits]
    lines.append(f"{len(hits)} match{'es' if len(hits) != 1 else ''}")
    _emit(args, payload, "\n".join(lines))
    return EXIT_OK


def cmd_counts(args) -> int:
    circuit = qasm.parse_file(args.file)
    stats = count_ops(circuit)
    if not args.expect:
        _emit(args, {"counts": {k.name: v for k, v in stats.histogram.items()}}, str(stats))
        return EXIT_OK
    expected = count_ops(library.build_subroutine(_spec_from_expect(args.expect)))
    kinds = [k for k in GateKind if k in expected.histogram or k in stats.histogram]
    mismatches = [(k, expected.histogram.get(k, 0), stats.histogram.get(k, 0)) for k in kinds
                  if expected.histogram.get(k, 0) != stats.histogram.get(k, 0)]
    payload = {"counts": {k.name: v for k, v in stats.histogram.items()},
               "expected": {k.name: v for k, v in expected.histogram.items()},
               "ok": not mismatches,
               "mismatches": [{"gate": k.name, "expected": e, "found": f} for k, e, f in mismatches]}
    if mismatches:
        text = "\n".join(f"{k.name}: expected {e}, found {f}" for k, e, f in mismatches)
    else:
        text = f"OK {stats}"
    _emit(args, payload, text)
    return EXIT_FAIL if mismatches else EXIT_OK


def cmd_gen_tests(args) -> int:
    spec = library.SubroutineSpec(args.kind, args.qubits, k=args.hamming, phase=args.phase)
    cases = library.generate_test_cases(spec)
    _write_or_print(args.output, vectors.dumps(cases) + "\n")
    return EXIT_OK


def cmd_swap_test(args) -> int:
    a, b = qasm.parse_file(args.file_a), qasm.parse_file(args.file_b)
    res = swap.swap_test(a, b, args.shots, args.seed)
    payload = {"shots": res.shots, "ones": res.ones, "p0": res.p0, "s": res.s,
               "delta_theta": res.delta_theta, "stderr": res.stderr, "seed": args.seed}
    text = (f"shots: {res.shots}\nones: {res.ones}\ns: {res.s:.6f} +/- {res.stderr:.6f}\n"
            f"delta_theta: {res.delta_theta:.6f} rad ({res.delta_theta / math.pi:.4f} pi)\nseed: {args.seed}")
    _emit(args, payload, text)
    return EXIT_OK


def cmd_inject(args) -> int:
    circuit = qasm.parse_file(args.file)
    qubits = tuple(int(q) for q in args.qubits.split(",")) if args.qubits else None
    m = mutate.Mutation(args.bug, target=args.target, qubits=qubits, gate=args.gate,
                        angle=args.angle, seed=args.seed)
    mutated = mutate.inject_bug(circuit, m)
    _write_or_print(args.output, qasm.serialize(mutated))
    if args.output:
        print(f"wrote {args.output} ({args.bug}, seed {args.seed})", file=sys.stderr)
    return EXIT_OK


def cmd_qsphere(args) -> int:
    circuit = qasm.parse_file(args.file)
    _write_or_print(args.output, sim.qsphere_json(sim.run(circuit)) + "\n")
    return EXIT_OK


def cmd_shots(args) -> int:
    plan = planning.estimate_shots(args.p, args.z, args.width)
    payload = {"p": plan.p, "z": plan.z, "half_width": plan.half_width, "shots": plan.shots, "sigma": plan.sigma}
    _emit(args, payload, f"shots: {plan.shots}\nsigma: {plan.sigma:.6g}")
    return EXIT_OK


# -- parser -----------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    seed = _default_seed()
    p = argparse.ArgumentParser(prog="qforge", description="Unit testing and debugging for quantum circuits.")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("slice", help="cut a circuit at break-barriers")
    s.add_argument("file")
    s.add_argument("--mode", choices=["standalone", "accumulated"], default="standalone")
    s.add_argument("--strip-idle", action="store_true", help="remove idle wires from each slice")
    s.add_argument("--out-dir")
    s.add_argument("--json", action="store_true")
    s.set_defaults(func=cmd_slice)

    s = sub.add_parser("test", help="run test vectors against a circuit")
    s.add_argument("file")
    s.add_argument("--vectors", required=True)
    s.add_argument("--mode", choices=["pclass", "fquant"], default="pclass")
    s.add_argument("--tolerance", type=float, default=1e-4)
    s.add_argument("--shots", type=int)
    s.add_argument("--seed", type=int, default=seed)
    s.add_argument("--json", action="store_true")
    s.set_defaults(func=cmd_test)

    s = sub.add_parser("categorize", help="classify a block as AP, PM or AR")
    s.add_argument("file")
    s.add_argument("--max-unitary-qubits", type=int, default=10)
    s.add_argument("--json", action="store_true")
    s.set_defaults(func=cmd_categorize)

    s = sub.add_parser("locate", help="find ops of a gate kind")
    s.add_argument("file")
    s.add_argument("--gate", required=True)
    s.add_argument("--qubits", help="comma-separated flat indices or reg[i] refs")
    s.add_argument("--json", action="store_true")
    s.set_defaults(func=cmd_locate)

    s = sub.add_parser("counts", help="gate histogram, optionally checked against a reference")
    s.add_argument("file")
    s.add_argument("--expect", help="reference subroutine, e.g. qft:4 or dicke:3:2")
    s.add_argument("--json", action="store_true")
    s.set_defaults(func=cmd_counts)

    s = sub.add_parser("gen-tests", help="generate the six-basis test vectors for a subroutine")
    s.add_argument("kind", choices=library.SUBROUTINE_KINDS)
    s.add_argument("--qubits", type=int, default=1)
    s.add_argument("--hamming", type=int)
    s.add_argument("--phase", type=float, default=0.0)
    s.add_argument("-o", "--output")
    s.set_defaults(func=cmd_gen_tests)

    s = sub.add_parser("swap-test", help="estimate the overlap of two prepared states")
    s.add_argument("file_a")
    s.add_argument("file_b")
    s.add_argument("--shots", type=int, default=swap.DEFAULT_SHOTS)
    s.add_argument("--seed", type=int, default=seed)
    s.add_argument("--json", action="store_true")
    s.set_defaults(func=cmd_swap_test)

    s = sub.add_parser("inject", help="write a mutated copy of a circuit")
    s.add_argument("file")
    s.add_argument("--bug", required=True, choices=mutate.MUTATION_KINDS)
    s.add_argument("--target", type=int)
    s.add_argument("--qubits")
    s.add_argument("--gate")
    s.add_argument("--angle", type=float)
    s.add_argument("--seed", type=int, default=seed)
    s.add_argument("-o", "--output")
    s.set_defaults(func=cmd_inject)

    s = sub.add_parser("qsphere", help="export Q-sphere node data of the output state")
    s.add_argument("file")
    s.add_argument("-o", "--output")
    s.set_defaults(func=cmd_qsphere)

    s = sub.add_parser("shots", help="plan a shot count for a confidence half-width")
    s.add_argument("--p", type=float, default=0.5)
    s.add_argument("--z", type=float, default=1.96)
    s.add_argument("--width", type=float, required=True)
    s.add_argument("--json", action="store_true")
    s.set_defaults(func=cmd_shots)
    return p


def main(argv: Sequence[str] | None = None) -> int:
    try:
        parser = build_parser()
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_ERROR
    try:
        return args.func(args)
    except qasm.ParseError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
    except vectors.VectorFormatError as exc:
        print(f"vector file error: {exc}", file=sys.stderr)
    except (CircuitError, sim.SimulationError, swap.CategoryError, UsageError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
    return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
