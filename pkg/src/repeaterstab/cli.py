"""Command-line front end.

    repeaterstab {bound,sweep,maxgain,coverage,echo} --scenario FILE [--out FILE]

Each command writes a CSV preceded by ``#`` comment lines that record the
scenario hash and a canonical echo of its parameters. Exit status is 0 on
success, 1 for an invalid scenario and 2 for a numerical failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import math
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .coverage import coverage_curve
from .deployment import make_multicell
from .echo_sim import EchoConfig, simulate_pair
from .errors import InvalidInputError, RepeaterError
from .scenario import Scenario, ScenarioError, fail_at, load_scenario
from .stability import alpha_grid, estimate_alpha_max, gershgorin_bound, measure_curve

EXIT_OK, EXIT_INVALID, EXIT_NUMERICAL = 0, 1, 2

GAIN_COLUMNS = {"alpha", "alpha_g", "alpha_max_estimate", "alpha_power", "alpha_used"}


def fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, str):
        return x
    if isinstance(x, (int, np.integer)) and not isinstance(x, bool):
        return str(int(x))
    x = float(x)
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return f"{x:.8e}"


class Table:
    def __init__(self, columns: list[str], db: bool = False):
        self.columns = list(columns)
        self.db = db
        self.rows: list[list] = []
        self.comments: list[str] = []
        if db:
            self.columns += [f"{c}_db" for c in columns if c in GAIN_COLUMNS]

    def add(self, *values):
        row = list(values)
        if self.db:
            base = self.columns[:len(values)]
            for c, v in zip(base, values):
                if c in GAIN_COLUMNS:
                    row.append(None if v is None else (20 * math.log10(v) if v > 0 else -math.inf))
        self.rows.append(row)

    def render(self, command: str, scn: Scenario) -> str:
        buf = io.StringIO()
        buf.write(f"# repeaterstab {__version__} {command}\n")
        buf.write(f"# scenario: {scn.source_name} sha256={scn.sha256}\n")
        buf.write(f"# params: {scn.echo_params()}\n")
        for c in self.comments:
            buf.write(f"# {c}\n")
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(self.columns)
        for row in self.rows:
            w.writerow([fmt(v) for v in row])
        return buf.getvalue()


def _need_deployment(scn: Scenario):
    if scn.deployment is None:
        fail_at(scn, "deployment", None, "this command needs a 'deployment' section")
    return scn.deployment


def _alpha_range(scn: Scenario, alpha_g: float) -> tuple[float, float]:
    a = scn.analysis
    lo, hi = a["alpha_lo"], a["alpha_hi"]
    if a["relative_to_alpha_g"]:
        if not math.isfinite(alpha_g):
            fail_at(scn, "analysis", None,
                    "relative gain range needs a finite Gershgorin bound; set relative_to_alpha_g: false")
        lo, hi = lo * alpha_g, hi * alpha_g
    return lo, hi


def cmd_bound(scn: Scenario, args) -> Table:
    if "bound" in scn.sections:
        b = scn.sections["bound"]
        t = Table(["M", "s", "n_repeaters", "alpha_g"], args.db)
        for M in b["cells"]:
            for s in b["spacings"]:
                dep = make_multicell(M, b["W"], s)
                t.add(M, s, dep.n, gershgorin_bound(dep, scn.channel, scn.grid))
        return t
    dep = _need_deployment(scn)
    t = Table(["kind", "n_repeaters", "alpha_g"], args.db)
    t.add(dep.kind, dep.n, gershgorin_bound(dep, scn.channel, scn.grid))
    return t


def cmd_sweep(scn: Scenario, args) -> Table:
    dep = _need_deployment(scn)
    ag = gershgorin_bound(dep, scn.channel, scn.grid)
    lo, hi = _alpha_range(scn, ag)
    alphas = alpha_grid(lo, hi, scn.analysis["n_alpha"])
    rep = measure_curve(dep, scn.channel, scn.grid, alphas, threads=args.threads)
    t = Table(["alpha", "measure", "measure_kind"], args.db)
    t.comments.append(f"alpha_g={fmt(ag)}")
    for a, m in zip(rep.alpha_grid, rep.measure):
        t.add(float(a), float(m), rep.measure_kind)
    return t


def cmd_maxgain(scn: Scenario, args) -> Table:
    dep = _need_deployment(scn)
    ag = gershgorin_bound(dep, scn.channel, scn.grid)
    lo, hi = _alpha_range(scn, ag)
    a = scn.analysis
    rep = estimate_alpha_max(dep, scn.channel, scn.grid, lo, hi, a["n_alpha"], a["eps_stab"], a["rtol"],
                             threads=args.threads)
    t = Table(["alpha_g", "alpha_max_estimate", "ratio", "status"], args.db)
    t.comments.append(f"measure_kind={rep.measure_kind} eps_stab={fmt(rep.eps_stab)}")
    t.add(rep.alpha_g, rep.alpha_max_estimate, rep.ratio, rep.status)
    return t


def cmd_coverage(scn: Scenario, args) -> Table:
    if "coverage" not in scn.sections:
        fail_at(scn, "coverage", None, "this command needs a 'coverage' section")
    c = scn.sections["coverage"]
    res = coverage_curve(c["N_list"], c["R"], c["gamma_db"], scn.channel, scn.grid, c["delta_max"],
                         c["gamma_convention"])
    t = Table(["N", "alpha_g", "alpha_power", "alpha_used", "limiting", "delta_m"], args.db)
    for r in res.records:
        t.add(r.N, r.alpha_g, r.alpha_power, r.alpha_used, r.limiting, r.delta)
    return t


def _read_signals(path: str, n: int) -> tuple[np.ndarray, np.ndarray]:
    try:
        with open(path, newline="") as fh:
            rows = [r for r in csv.reader(line for line in fh if not line.startswith("#")) if r]
    except OSError as exc:
        raise ScenarioError(f"{path}: cannot read input signals: {exc.strerror}") from None
    if rows and rows[0][:2] == ["x1", "x2"]:
        rows = rows[1:]
    try:
        data = np.array([[float(r[0]), float(r[1])] for r in rows], dtype=float).reshape(-1, 2)
    except (ValueError, IndexError):
        raise ScenarioError(f"{path}: input signals must have two numeric columns x1,x2") from None
    if data.shape[0] != n:
        raise ScenarioError(f"{path}: {data.shape[0]} samples, scenario expects {n}")
    return data[:, 0], data[:, 1]


def cmd_echo(scn: Scenario, args) -> Table:
    if "echo" not in scn.sections:
        fail_at(scn, "echo", None, "this command needs an 'echo' section")
    e = scn.sections["echo"]
    try:
        cfg = EchoConfig(e["alpha"], e["beta"], e["tau"], e["sample_rate"], e["duration"])
    except InvalidInputError as exc:
        fail_at(scn, "echo", None, str(exc))
    n = cfg.n_samples
    if args.input:
        x1, x2 = _read_signals(args.input, n)
    elif e["input"] == "file":
        fail_at(scn, "echo", "input", "echo.input is 'file' but no --input was given")
    else:
        x1, x2 = np.zeros(n), np.zeros(n)
        x1[0] = 1.0
    y1, y2 = simulate_pair(cfg, x1, x2)
    t = Table(["t", "y1", "y2"])
    t.comments.append(f"delay_samples={cfg.delay_samples} loop_gain={fmt(cfg.loop_gain)}")
    for i in range(n):
        t.add(i / cfg.sample_rate, y1[i], y2[i])
    return t


COMMANDS = {"bound": cmd_bound, "sweep": cmd_sweep, "maxgain": cmd_maxgain,
            "coverage": cmd_coverage, "echo": cmd_echo}


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="repeaterstab",
                                description="Stability and coverage analysis for interacting repeaters.")
    p.add_argument("command", choices=sorted(COMMANDS))
    p.add_argument("--scenario", required=True, help="YAML scenario file")
    p.add_argument("--out", help="output CSV (default: stdout)")
    p.add_argument("--threads", type=int, default=1,
                   help="worker threads for frequency sweeps; does not change results")
    p.add_argument("--input", help="echo only: CSV with columns x1,x2, one sample per row")
    p.add_argument("--db", action="store_true", help="append dB companion columns for gains")
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.threads < 1:
        print("repeaterstab: --threads must be >= 1", file=sys.stderr)
        return EXIT_INVALID
    try:
        scn = load_scenario(args.scenario)
        table = COMMANDS[args.command](scn, args)
        text = table.render(args.command, scn)
    except (ScenarioError, InvalidInputError) as exc:
        print(f"repeaterstab: invalid scenario: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except (RepeaterError, FloatingPointError, ArithmeticError, np.linalg.LinAlgError) as exc:
        print(f"repeaterstab: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
