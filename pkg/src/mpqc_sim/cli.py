"""Command-line front end.

Exit codes: 0 success, 1 validation failure, 2 configuration error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from pathlib import Path

import numpy as np

from .analysis import fit_proportional, loglog_exponent
from .css import CATALOG, DualContainmentViolated, GateId, KNotOne, NonPositiveK, get_code, load_css_files, transversal_gate_set
from .engine import METRIC_FIELDS, SCHEMA_VERSION, ConfigInvalid, ProtocolConfig, mpqc_run
from .gf2 import CodeFormatError
from .statevector import GATE_MATRICES, PDAG, QUBIT_CEILING, X, check_transversal_action, clifford_membership, eigen_check, single_qubit

EXIT_OK = 0
EXIT_INVALID = 1
EXIT_CONFIG = 2

CSV_FIELDS = METRIC_FIELDS + ["schema_version"]


class UsageError(Exception):
    pass


def _load_code(args):
    if getattr(args, "v", None) or getattr(args, "w", None):
        if not (args.v and args.w):
            raise UsageError("--v and --w must be given together")
        for p in (args.v, args.w):
            if not Path(p).exists():
                raise UsageError(f"no such file: {p}")
        return load_css_files(args.v, args.w)
    name = args.code or "steane_7"
    if name not in CATALOG:
        raise UsageError(f"unknown code {name!r}; known: {', '.join(sorted(CATALOG))}")
    return get_code(name)


def cmd_validate_code(args) -> int:
    try:
        code = _load_code(args)
    except (DualContainmentViolated, NonPositiveK, CodeFormatError, ValueError) as err:
        print(f"invalid code: {type(err).__name__}: {err}")
        return EXIT_INVALID
    gates = transversal_gate_set(code)
    print(f"code: {code.name}")
    print(f"[[n,k,d]] = [[{code.n},{code.k},{code.d}]]")
    print(f"V: [{code.v.n},{code.v.k},{code.v.d}]  W: [{code.w.n},{code.w.k},{code.w.d}]")
    print(f"weight class: {code.weight_class.name}")
    print(f"self-dual: {code.self_dual}")
    print(f"t_max: {code.t_max}")
    print(f"X stabilizer weights: {code.x_stabilizers.sum(axis=1).tolist()}")
    print(f"transversal gates: {{{','.join(sorted(g.value for g in gates))}}}")
    checks = {
        "dual(V) inside W": all(code.w.contains(r) for r in code.v_dual.generator.bits),
        "t_max = (d-1)//2": code.t_max == (code.d - 1) // 2,
    }
    if code.n <= QUBIT_CEILING and code.k == 1:
        for g in sorted(gates, key=lambda g: g.value):
            rep = check_transversal_action(code, g)
            checks[f"{g.value} preserves codespace"] = rep.preserves_codespace
        for g in (GateId.H, GateId.P, GateId.T):
            if g not in gates:
                rep = check_transversal_action(code, g)
                print(f"note: {g.value} not advertised; statevector leakage {rep.leakage:.3e}")
    ok = all(checks.values())
    for name, passed in checks.items():
        print(f"check {name}: {'pass' if passed else 'FAIL'}")
    return EXIT_OK if ok else EXIT_INVALID


def algebraic_checks_report(n: int = 7) -> tuple[list[str], bool]:
    lines = []
    m = single_qubit("m")
    xp = X @ PDAG
    lam1 = eigen_check(xp, m)
    lam2 = eigen_check(np.exp(1j * np.pi / 4) * xp, m)
    ok1 = lam1 is not None and abs(lam1 - np.exp(7j * np.pi / 4)) <= 1e-10
    ok2 = lam2 is not None and abs(lam2 - 1) <= 1e-10
    lines.append(f"eigenvalue of X Pdag on |m>: {_fmt(lam1)} (angle {_angle(lam1)}) {'pass' if ok1 else 'FAIL'}")
    lines.append(f"eigenvalue of e^(i pi/4) X Pdag on |m>: {_fmt(lam2)} {'pass' if ok2 else 'FAIL'}")
    ok = ok1 and ok2
    for gate in (GateId.CPdag, GateId.CXPdag):
        rep = clifford_membership(GATE_MATRICES[gate])
        terms = " + ".join(f"({_fmt(c)}){p}" for p, c in sorted(rep.decomposition.items())) if rep.decomposition else ""
        lines.append(f"{gate.value} Clifford: {rep.is_clifford}; witness {rep.witness} -> {terms}")
        ok = ok and not rep.is_clifford
    lines.append(f"workspace per node, n={n}:")
    lines.append(f"  magic-state T teleportation (n^2+4n): {n * n + 4 * n}")
    lines.append(f"  H teleportation with |+> ancilla (n^2+3n): {n * n + 3 * n}")
    return lines, ok


def _fmt(z) -> str:
    if z is None:
        return "none"
    z = complex(z)
    return f"{z.real:+.10f}{z.imag:+.10f}j"


def _angle(z) -> str:
    if z is None:
        return "-"
    return f"{(np.angle(z) % (2 * np.pi)) / np.pi:.6f} pi"


def cmd_appendix_checks(args) -> int:
    lines, ok = algebraic_checks_report(args.n)
    print("\n".join(lines))
    return EXIT_OK if ok else EXIT_INVALID


def _read_config(args) -> ProtocolConfig:
    if not args.config:
        raise UsageError("--config is required")
    path = Path(args.config)
    if not path.exists():
        raise UsageError(f"no such config file: {path}")
    try:
        data = json.loads(path.read_text())
    except json.JSONDecodeError as err:
        raise UsageError(f"config is not valid JSON: {err}") from err
    if args.seed is not None:
        data["seed"] = args.seed
    if getattr(args, "code", None):
        data["code"] = args.code
    try:
        return ProtocolConfig.from_json(data)
    except TypeError as err:
        raise UsageError(str(err)) from err


def write_metrics(rows: list[dict], path: Path, fits: list[str] = ()) -> None:
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=CSV_FIELDS, lineterminator="\n")
    w.writeheader()
    for row in rows:
        w.writerow({**row, "schema_version": SCHEMA_VERSION})
    for line in fits:
        buf.write(f"# {line}\n")
    path.write_text(buf.getvalue())


def cmd_run(args) -> int:
    cfg = _read_config(args)
    tr = mpqc_run(cfg)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    tr.write(out / "transcript.json")
    write_metrics([tr.metrics_row()], out / "metrics.csv")
    print(f"outcome: {tr.outcome}  |B| = {len(tr.cheaters['B'])}  kappa = {tr.kappa}  "
          f"peak = {tr.peak_qubits}  comm = {tr.comm_qubits}")
    print(f"wrote {out / 'transcript.json'} and {out / 'metrics.csv'}")
    return EXIT_OK


def parse_range(text: str | None) -> list[int]:
    """``"2:6"`` (inclusive), ``"2,3,5"`` or a single integer."""
    if text is None or not text.strip():
        return []
    text = text.strip()
    try:
        if ":" in text:
            lo, hi = (int(v) for v in text.split(":"))
            return list(range(lo, hi + 1))
        return [int(v) for v in text.split(",") if v.strip()]
    except ValueError as err:
        raise UsageError(f"bad range {text!r}") from err


def cmd_sweep(args) -> int:
    base = _read_config(args)
    rs = parse_range(args.r) if args.r is not None else None
    codes = [c.strip() for c in args.codes.split(",") if c.strip()] if args.codes is not None else None
    if rs is None and codes is None:
        raise UsageError("give --r and/or --codes")
    rs = rs if rs is not None else [base.r]
    codes = codes if codes is not None else [base.code]
    rows, trs = [], []
    for code in codes:
        for r in rs:
            data = {**base.to_json(), "code": code, "r": r, "n": None}
            if base.inputs is not None and get_code(code).n != len(base.inputs):
                data["inputs"] = None
            tr = mpqc_run(ProtocolConfig.from_json(data))
            trs.append(tr)
            rows.append(tr.metrics_row())
    fits = []
    if len(trs) >= 2:
        xs = [tr.kappa * tr.n * tr.r ** 2 for tr in trs]
        ys = [tr.comm_qubits for tr in trs]
        c, resid = fit_proportional(xs, ys)
        fits.append(f"fit comm_qubits = c*kappa*n*r^2: c={c:.6g} relative_residual={resid:.6g}")
        if len(set(rs)) > 1 and len(codes) == 1:
            fits.append(f"fit log-log exponent of comm_qubits in r: {loglog_exponent([tr.r for tr in trs], ys):.6g}")
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    write_metrics(rows, out / "metrics.csv", fits)
    for line in fits:
        print(line)
    print(f"wrote {len(rows)} rows to {out / 'metrics.csv'}")
    return EXIT_OK


def cmd_check_transversal(args) -> int:
    code = _load_code(args)
    gates = [GateId(g) for g in args.gate] if args.gate else [GateId.H, GateId.P, GateId.T, GateId.CX]
    for g in gates:
        rep = check_transversal_action(code, g)
        print(f"{code.name} {g.value}: preserves={rep.preserves_codespace} leakage={rep.leakage:.3e} "
              f"induced={rep.induced_logical} method={rep.method}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="mpqc-sim", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    def code_flags(sp):
        sp.add_argument("--code", help="catalog code name")
        sp.add_argument("--v", help="generator file for V (with --w)")
        sp.add_argument("--w", help="generator file for W (with --v)")

    sp = sub.add_parser("validate-code", help="check a CSS code and its transversal gates")
    code_flags(sp)
    sp.set_defaults(func=cmd_validate_code)

    sp = sub.add_parser("appendix-checks", help="eigenvalue, Clifford and workspace checks")
    sp.add_argument("--n", type=int, default=7)
    sp.set_defaults(func=cmd_appendix_checks)

    for name, func, helptext in (("run", cmd_run, "run one protocol config"),
                                 ("sweep", cmd_sweep, "sweep r or codes over a config template")):
        sp = sub.add_parser(name, help=helptext)
        sp.add_argument("--config", help="JSON config file")
        sp.add_argument("--seed", type=int)
        sp.add_argument("--out", default="out")
        sp.add_argument("--code", help="override the config's code")
        if name == "sweep":
            sp.add_argument("--r", help="r values, e.g. 2:6 or 2,4")
            sp.add_argument("--codes", help="comma-separated code names")
        sp.set_defaults(func=func)

    sp = sub.add_parser("check-transversal", help="statevector check of transversal gates")
    code_flags(sp)
    sp.add_argument("--gate", action="append", choices=[g.value for g in GateId])
    sp.set_defaults(func=cmd_check_transversal)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_CONFIG if exc.code else EXIT_OK
    try:
        return args.func(args)
    except (UsageError, ConfigInvalid, KNotOne) as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
