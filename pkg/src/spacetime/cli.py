"""Command-line entry point: ``python -m spacetime <subcommand> circuit.txt ...``.

Exit codes: 0 success, 2 parse error, 3 validation error, 4 budget exceeded,
5 internal invariant violation.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from dataclasses import dataclass
from pathlib import Path

from . import gf2
from .circuit import (
    Circuit,
    CircuitSyntaxError,
    CircuitValidationError,
    parse_circuit,
    serialize_circuit,
)
from .decode import (
    DecoderBudgetError,
    NoiseModel,
    build_lookup_decoder,
    dump_table,
    monte_carlo,
)
from .outcome import compute_outcome_code, linearize, outcome_code_json, syndrome_bits
from .propagation import check_operator_forward, effect
from .spacetime_code import (
    SCHEMA_VERSION,
    build_spacetime_code,
    code_json,
    code_metadata,
    commutation_violations,
    export_check_matrix,
    generated_rank,
    logical_generators,
    syndrome_Q_bits,
    write_alist,
    write_matrix_market,
)
from .sparsify import BudgetError, SparsifyReport, low_weight_stabilizers, sparsified_basis

EXIT_OK, EXIT_PARSE, EXIT_VALIDATION, EXIT_BUDGET, EXIT_INVARIANT = 0, 2, 3, 4, 5


class InvariantViolation(RuntimeError):
    pass


@dataclass(frozen=True)
class CommandConfig:
    subcommand: str
    input: Path
    json: bool = False
    emit_linearized: Path | None = None
    alist: Path | None = None
    mm: Path | None = None
    verify: bool = False
    max_weight: int = 4
    budget: int = 20
    p: float = 0.0
    p_unitary: float | None = None
    p_measurement: float | None = None
    p_idle: float | None = None
    trials: int = 0
    seed: int | None = None
    max_faults: int = 1
    table: Path | None = None

    def __post_init__(self) -> None:
        for name in ("p", "p_unitary", "p_measurement", "p_idle"):
            value = getattr(self, name)
            if value is not None and not 0.0 <= value <= 1.0:
                raise ValueError(f"--{name.replace('_', '-')} must lie in [0, 1]")
        if self.max_weight < 0 or self.max_faults < 0 or self.trials < 0 or self.budget < 0:
            raise ValueError("counts must be non-negative")
        if self.subcommand == "simulate" and self.seed is None:
            raise ValueError("simulate requires --seed")

    def noise_model(self) -> NoiseModel:
        def pick(v: float | None) -> float:
            return self.p if v is None else v

        return NoiseModel(pick(self.p_unitary), pick(self.p_measurement), pick(self.p_idle))


def _load(path: Path) -> Circuit:
    return parse_circuit(path.read_text(encoding="utf-8"))


def _emit(text: str) -> None:
    sys.stdout.write(text if text.endswith("\n") else text + "\n")


def _linear_pipeline(c: Circuit):
    lin = linearize(c)
    oc, group = compute_outcome_code(lin)
    return lin, oc, group


def cmd_validate(cfg: CommandConfig) -> int:
    c = _load(cfg.input)
    _emit(f"ok: n={c.n} depth={c.depth} operations={len(c.ops)} measurements={c.m}")
    return EXIT_OK


def cmd_checks(cfg: CommandConfig) -> int:
    c = _load(cfg.input)
    oc, group = compute_outcome_code(c)
    lin = linearize(c)
    if cfg.emit_linearized is not None:
        cfg.emit_linearized.write_text(serialize_circuit(lin), encoding="utf-8")
    if cfg.json:
        payload = json.loads(outcome_code_json(oc, group))
        payload = {"schema_version": SCHEMA_VERSION, **payload}
        payload["negated_measurements"] = [
            j for j in range(c.m) if lin.measurements[j].pauli != c.measurements[j].pauli
        ]
        _emit(json.dumps(payload, indent=2))
        return EXIT_OK
    lines = [f"m={oc.m} k={oc.k} r={oc.r}"]
    lines += [f"check {gf2.to_bitstring(ch.u, oc.m)} b={ch.b}" for ch in oc.checks]
    lines += [f"stabilizer {g}" for g in group.generators]
    lines += [f"logical {a} {b}" for a, b in group.logicals]
    _emit("\n".join(lines))
    return EXIT_OK


def _verify(c: Circuit, oc, code, logicals) -> None:
    problems = []
    if commutation_violations(code):
        problems.append("check operators do not commute")
    for u, s in zip(code.checks, code.stabilizers):
        if check_operator_forward(c, u) != s:
            problems.append(f"forward and backward check operators differ for u={gf2.to_bitstring(u, c.m)}")
        if s.layers[0]:
            problems.append("check operator acts on the input layer")
    if generated_rank([*code.stabilizers, *logicals]) != 2 * code.K + code.r:
        problems.append("stabilizers and logicals do not have rank 2K + r")
    if any(syndrome_Q_bits(code, f) for f in logicals):
        problems.append("a logical generator anticommutes with a stabilizer")
    for s in code.stabilizers:
        if syndrome_bits(oc, effect(c, s).f):
            problems.append("a stabilizer has a nonzero outcome syndrome")
    if problems:
        raise InvariantViolation("; ".join(problems))


def cmd_spacetime(cfg: CommandConfig) -> int:
    c, oc, _ = _linear_pipeline(_load(cfg.input))
    code = build_spacetime_code(c, oc)
    logicals = logical_generators(c, oc)
    if cfg.verify:
        _verify(c, oc, code, logicals)
    rows = export_check_matrix(code)
    if cfg.alist is not None:
        cfg.alist.write_text(write_alist(rows, 2 * code.N), encoding="utf-8")
    if cfg.mm is not None:
        cfg.mm.write_text(write_matrix_market(rows, 2 * code.N), encoding="utf-8")
    if cfg.json:
        _emit(code_json(code, logicals))
        return EXIT_OK
    lines = [f"N={code.N} K={code.K} r={code.r}"]
    lines += [f"stabilizer {s}" for s in code.stabilizers]
    if cfg.verify:
        lines.append("verify: ok")
    _emit("\n".join(lines))
    return EXIT_OK


def cmd_sparsify(cfg: CommandConfig) -> int:
    c, oc, _ = _linear_pipeline(_load(cfg.input))
    code = build_spacetime_code(c, oc)
    report = SparsifyReport()
    found = low_weight_stabilizers(c, oc, code, cfg.max_weight, budget=cfg.budget, report=report)
    basis = sparsified_basis(code, found, report)
    sparse = code.with_stabilizers(basis)
    if cfg.alist is not None:
        cfg.alist.write_text(write_alist(export_check_matrix(sparse), 2 * code.N), encoding="utf-8")
    if cfg.json:
        payload = code_metadata(sparse)
        payload["stabilizers"] = [str(s) for s in basis]
        payload["report"] = report.to_json()
        _emit(json.dumps(payload, indent=2))
        return EXIT_OK
    lines = [f"N={code.N} K={code.K} r={code.r} max_weight={cfg.max_weight}"]
    lines += [f"stabilizer w={s.weight} {s}" for s in basis]
    hist = report.to_json()["basis_weight_histogram"]
    lines.append("weights " + " ".join(f"{w}:{n}" for w, n in hist.items()))
    _emit("\n".join(lines))
    return EXIT_OK


def cmd_simulate(cfg: CommandConfig) -> int:
    c, oc, group = _linear_pipeline(_load(cfg.input))
    code = build_spacetime_code(c, oc)
    nm = cfg.noise_model()
    d = build_lookup_decoder(c, code, nm, cfg.max_faults)
    if cfg.table is not None:
        cfg.table.write_bytes(dump_table(d))
    report = monte_carlo(c, oc, group, nm, d, cfg.trials, cfg.seed)
    report.p = cfg.p
    _emit(json.dumps(report.to_json(), indent=2))
    return EXIT_OK


COMMANDS = {
    "validate": cmd_validate,
    "checks": cmd_checks,
    "spacetime": cmd_spacetime,
    "sparsify": cmd_sparsify,
    "simulate": cmd_simulate,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="spacetime", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="subcommand", required=True)

    def add(name: str, help_text: str) -> argparse.ArgumentParser:
        p = sub.add_parser(name, help=help_text)
        p.add_argument("input", type=Path, help="circuit file")
        return p

    add("validate", "parse and validate a circuit")
    p = add("checks", "outcome-code checks and output stabilizer group")
    p.add_argument("--json", action="store_true")
    p.add_argument("--emit-linearized", type=Path, metavar="FILE")
    p = add("spacetime", "spacetime code generators and parameters")
    p.add_argument("--json", action="store_true")
    p.add_argument("--alist", type=Path, metavar="FILE")
    p.add_argument("--mm", type=Path, metavar="FILE")
    p.add_argument("--verify", action="store_true")
    p = add("sparsify", "connected low-weight stabilizer generators")
    p.add_argument("--max-weight", type=int, required=True)
    p.add_argument("--budget", type=int, default=20, help="max restricted generators per ball")
    p.add_argument("--json", action="store_true")
    p.add_argument("--alist", type=Path, metavar="FILE")
    p = add("simulate", "Monte-Carlo run of the lookup decoder")
    p.add_argument("--p", type=float, required=True)
    p.add_argument("--p-unitary", type=float)
    p.add_argument("--p-measurement", type=float)
    p.add_argument("--p-idle", type=float)
    p.add_argument("--trials", type=int, required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--max-faults", type=int, default=1)
    p.add_argument("--table", type=Path, metavar="FILE", help="write the binary lookup table")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.WARNING, format="warning: %(message)s", stream=sys.stderr)
    fields = {k.replace("-", "_"): v for k, v in vars(args).items() if v is not None}
    try:
        cfg = CommandConfig(**fields)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    try:
        return COMMANDS[cfg.subcommand](cfg)
    except CircuitSyntaxError as exc:
        print(f"syntax error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except CircuitValidationError as exc:
        for diag in exc.diagnostics:
            print(f"invalid: {diag}", file=sys.stderr)
        return EXIT_VALIDATION
    except (BudgetError, DecoderBudgetError) as exc:
        print(f"budget exceeded: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except InvariantViolation as exc:
        print(f"invariant violation: {exc}", file=sys.stderr)
        return EXIT_INVARIANT
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE


if __name__ == "__main__":
    sys.exit(main())
