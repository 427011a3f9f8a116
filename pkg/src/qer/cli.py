"""``qer`` command line: single solves, gamma sweeps and small-gamma fits."""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import math
import os
import sys
import tempfile
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from .channel import _encode_matrix
from .codes import CodeIsometry, StabilizerCode, five_qubit_code, leung4_code, load_code, logical_states
from .recovery import (
    amplitude_damping_noise,
    fit_quadratic,
    fixed_recovery,
    no_recovery_baseline,
    optimal_recovery,
    stabilizer_qec_recovery,
)
from .sdp import SdpConvergenceError

log = logging.getLogger("qer")

CSV_HEADER = ["gamma", "f_optimal", "f_qec", "f_none", "gap", "iterations", "wall_time"]
RECOVERY_KINDS = ("optimal", "qec", "none")

EXIT_OK, EXIT_CONFIG, EXIT_SOLVER, EXIT_IO = 0, 2, 3, 4

SWEEP_SCHEMA = {
    "type": "object",
    "required": ["code", "records"],
    "properties": {
        "code": {"type": "string"},
        "recoveries": {"type": "array", "items": {"enum": list(RECOVERY_KINDS)}},
        "tol": {"type": "number"},
        "records": {
            "type": "array",
            "items": {
                "type": "object",
                "required": CSV_HEADER,
                "properties": {
                    "gamma": {"type": "number", "minimum": 0, "maximum": 1},
                    "f_optimal": {"type": ["number", "null"]},
                    "f_qec": {"type": ["number", "null"]},
                    "f_none": {"type": ["number", "null"]},
                    "gap": {"type": ["number", "null"]},
                    "iterations": {"type": ["integer", "null"]},
                    "wall_time": {"type": "number", "minimum": 0},
                },
            },
        },
    },
}

SOLUTION_SCHEMA = {
    "type": "object",
    "required": ["gamma", "method", "fidelity", "choi", "kraus", "dual_gap"],
    "properties": {
        "gamma": {"type": "number"},
        "method": {"type": "string"},
        "fidelity": {"type": "number"},
        "choi": {"type": "array"},
        "kraus": {"type": "array"},
        "dual_gap": {"type": ["number", "null"]},
    },
}


class ConfigError(ValueError):
    pass


def resolve_code(spec: str) -> tuple[Optional[StabilizerCode], CodeIsometry]:
    """Map ``five-qubit``, ``leung4`` or ``file:PATH`` to (stabilizer code or None, encoder)."""
    if spec == "five-qubit":
        code = five_qubit_code()
        return code, logical_states(code)
    if spec == "leung4":
        return None, leung4_code()
    if spec.startswith("file:"):
        try:
            return load_code(spec[5:])
        except OSError as exc:
            raise ConfigError(f"cannot read code file: {exc}") from exc
        except (KeyError, ValueError, TypeError) as exc:
            raise ConfigError(f"bad code file: {exc}") from exc
    raise ConfigError(f"unknown code {spec!r} (expected five-qubit, leung4 or file:PATH)")


def n_qubits(enc: CodeIsometry) -> int:
    n = int(round(math.log2(enc.dim_code)))
    if 2**n != enc.dim_code:
        raise ConfigError("code dimension is not a power of two")
    return n


@dataclass(frozen=True)
class SweepRecord:
    gamma: float
    f_optimal: Optional[float]
    f_qec: Optional[float]
    f_none: Optional[float]
    gap: Optional[float]
    iterations: Optional[int]
    wall_time: float


@dataclass(frozen=True)
class SweepConfig:
    code: str
    gammas: tuple[float, ...]
    recoveries: tuple[str, ...] = RECOVERY_KINDS
    tol: float = 1e-9
    jobs: int = 1

    def __post_init__(self):
        bad = set(self.recoveries) - set(RECOVERY_KINDS)
        if bad:
            raise ConfigError(f"unknown recoveries {sorted(bad)}")
        if any(not 0 <= g <= 1 for g in self.gammas):
            raise ConfigError("gamma grid must lie in [0, 1]")
        if not self.gammas:
            raise ConfigError("empty gamma grid")


def gamma_grid(start: float, stop: float, steps: int) -> tuple[float, ...]:
    if steps < 1:
        raise ConfigError("steps must be >= 1")
    return tuple(float(g) for g in np.linspace(start, stop, steps))


def _evaluate_point(cfg: SweepConfig, gamma: float) -> SweepRecord:
    t0 = time.perf_counter()
    code, enc = resolve_code(cfg.code)
    noise = amplitude_damping_noise(gamma, n_qubits(enc))
    f_opt = gap = iters = f_qec = f_none = None
    if "optimal" in cfg.recoveries:
        try:
            res = optimal_recovery(enc, noise, tol=cfg.tol, gamma=gamma)
            f_opt, gap, iters = res.fidelity, res.certificate.gap, res.certificate.iterations
        except SdpConvergenceError as exc:
            log.warning("gamma=%g: %s", gamma, exc)
    if "qec" in cfg.recoveries and code is not None:
        try:
            f_qec = fixed_recovery(stabilizer_qec_recovery(code, enc), enc, noise).fidelity
        except ValueError as exc:
            log.warning("gamma=%g: no QEC recovery (%s)", gamma, exc)
    if "none" in cfg.recoveries:
        f_none = no_recovery_baseline(gamma)
    return SweepRecord(gamma, f_opt, f_qec, f_none, gap, iters, time.perf_counter() - t0)


def run_sweep(cfg: SweepConfig) -> list[SweepRecord]:
    """One record per grid point, ordered by gamma."""
    resolve_code(cfg.code)  # fail fast on a bad code id
    gammas = sorted(cfg.gammas)
    if cfg.jobs > 1:
        with ProcessPoolExecutor(max_workers=cfg.jobs) as pool:
            records = list(pool.map(_evaluate_point, [cfg] * len(gammas), gammas))
    else:
        records = [_evaluate_point(cfg, g) for g in gammas]
    return records


def _fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, int):
        return str(v)
    return f"{v:.17g}"


def records_to_csv(records: Sequence[SweepRecord]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_HEADER)
    for r in records:
        w.writerow([_fmt(getattr(r, k)) for k in CSV_HEADER])
    return buf.getvalue()


def read_csv(path) -> list[dict]:
    with open(path, newline="") as fh:
        rows = list(csv.DictReader(fh))
    if rows and list(rows[0].keys()) != CSV_HEADER:
        raise ConfigError(f"unexpected CSV header in {path}")
    return rows


def atomic_write(path, text: str) -> None:
    path = Path(path)
    fd, tmp = tempfile.mkstemp(dir=path.parent or ".", prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def sweep_json(cfg: SweepConfig, records: Sequence[SweepRecord]) -> str:
    return json.dumps(
        {
            "code": cfg.code,
            "recoveries": list(cfg.recoveries),
            "tol": cfg.tol,
            "records": [asdict(r) for r in records],
        },
        indent=1,
    )


def plot_script(csv_path: str, title: str) -> str:
    """gnuplot script drawing entanglement fidelity against gamma from a sweep CSV."""
    return f"""set datafile separator ","
set key autotitle columnhead bottom left
set title "{title}"
set xlabel "gamma"
set ylabel "entanglement fidelity"
set grid
set terminal pngcairo size 800,600
set output "{Path(csv_path).with_suffix('.png').name}"
plot "{Path(csv_path).name}" using 1:2 with linespoints title "optimum QER", \\
     "" using 1:3 with linespoints title "QEC recovery", \\
     "" using 1:4 with lines dashtype 2 title "no recovery"
"""


def solution_dict(res, gamma: float) -> dict:
    return {
        "gamma": gamma,
        "method": res.method,
        "fidelity": res.fidelity,
        "choi": _encode_matrix(res.recovery.x),
        "kraus": [_encode_matrix(k) for k in res.kraus.elements],
        "dual_gap": res.certificate.gap if res.certificate is not None else None,
    }


# -- subcommands ----------------------------------------------------------------

def cmd_solve(args) -> int:
    code, enc = resolve_code(args.code)
    if not 0 <= args.gamma <= 1:
        raise ConfigError("gamma must lie in [0, 1]")
    noise = amplitude_damping_noise(args.gamma, n_qubits(enc))
    try:
        res = optimal_recovery(enc, noise, tol=args.tol, gamma=args.gamma)
    except SdpConvergenceError as exc:
        log.error("%s", exc)
        return EXIT_SOLVER
    cert = res.certificate
    print(
        f"gamma={args.gamma:g} fidelity={res.fidelity:.12f} gap={cert.gap:.3e} "
        f"iterations={cert.iterations} kraus={len(res.kraus)}"
    )
    if args.out:
        atomic_write(args.out, json.dumps(solution_dict(res, args.gamma)))
    return EXIT_OK


def cmd_sweep(args) -> int:
    recs = tuple(r.strip() for r in args.recoveries.split(",") if r.strip())
    cfg = SweepConfig(
        code=args.code,
        gammas=gamma_grid(args.gamma_start, args.gamma_stop, args.steps),
        recoveries=recs,
        tol=args.tol,
        jobs=args.jobs,
    )
    records = run_sweep(cfg)
    text = records_to_csv(records)
    if args.out:
        atomic_write(args.out, text)
        atomic_write(Path(args.out).with_suffix(".json"), sweep_json(cfg, records))
    else:
        sys.stdout.write(text)
    if args.plot:
        if not args.out:
            raise ConfigError("--plot needs --out for the CSV it reads")
        atomic_write(args.plot, plot_script(args.out, f"{args.code}, amplitude damping"))
    if "optimal" in recs and all(r.f_optimal is None for r in records):
        return EXIT_SOLVER
    return EXIT_OK


def cmd_fit(args) -> int:
    rows = read_csv(args.inp)
    if rows and args.column not in rows[0]:
        raise ConfigError(f"no column {args.column!r}")
    pts = [
        (float(r["gamma"]), float(r[args.column]))
        for r in rows
        if r[args.column] and 0 < float(r["gamma"]) <= args.max_gamma
    ]
    try:
        fit = fit_quadratic(pts)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    print(f"F ~ 1 - {fit.quadratic:.6f} gamma^2 + {-fit.cubic:.6f} gamma^3  (residual {fit.residual:.3e}, {len(pts)} points)")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="qer", description="Optimum quantum error recovery via SDP")
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)

    s = sub.add_parser("solve", help="optimal recovery at one gamma")
    s.add_argument("--code", required=True)
    s.add_argument("--gamma", type=float, required=True)
    s.add_argument("--tol", type=float, default=1e-9)
    s.add_argument("--out")
    s.set_defaults(func=cmd_solve)

    s = sub.add_parser("sweep", help="fidelity curves over a gamma grid")
    s.add_argument("--code", required=True)
    s.add_argument("--gamma-start", type=float, default=0.0)
    s.add_argument("--gamma-stop", type=float, default=0.5)
    s.add_argument("--steps", type=int, default=26)
    s.add_argument("--recoveries", default="optimal,qec,none")
    s.add_argument("--tol", type=float, default=1e-9)
    s.add_argument("--jobs", type=int, default=1)
    s.add_argument("--out")
    s.add_argument("--plot")
    s.set_defaults(func=cmd_sweep)

    s = sub.add_parser("fit", help="small-gamma quadratic coefficient from a sweep CSV")
    s.add_argument("--in", dest="inp", required=True)
    s.add_argument("--column", default="f_optimal")
    s.add_argument("--max-gamma", type=float, default=0.01)
    s.set_defaults(func=cmd_fit)
    return ap


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"qer: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"qer: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
