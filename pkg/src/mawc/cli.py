"""Command-line front end.

Every subcommand takes a JSON config (``--config``), a master seed and an
output path.  Results are JSON documents whose ``timing`` entry is the only
part allowed to differ between reruns; CSV summaries carry the seed and a
hash of the config on every row.

Exit codes: 0 success, 3 precondition failure (including an empty rate
window), 4 property violation in a scan, 5 enumeration budget exceeded.
"""

from __future__ import annotations

import argparse
import itertools
import json
import sys
import time
import warnings
from datetime import datetime, timezone
from pathlib import Path
from typing import Any

from . import __version__
from .channel import MawcParams, degradedness_gap
from .compcode import SimConfig, code_for, rate_window, simulate_error_prob
from .errors import BudgetExceededError, EmptyRateWindowError, PreconditionError
from .jsonio import config_hash, csv_text, dumps
from .leakage import exact_total_leakage
from .rates import (
    DegenerateRate,
    RateQuery,
    bsc_wiretap_secrecy_capacity,
    computation_capacity,
    secrecy_computation_capacity,
    separation_computation_rate,
    separation_secrecy_rate,
)
from .separation import SeparationConfig, separation_pipeline
from .source import JointPMF, binary_entropy, condition_check, doubly_symmetric, entropy, function_pmf, theorem2_scan

EXIT_OK = 0
EXIT_PRECONDITION = 3
EXIT_PROPERTY = 4
EXIT_BUDGET = 5

# swapped out by tests to exercise the failure path
SCAN_CHECKER = condition_check

RATE_COLUMNS = ["seed", "config_hash", "p", "q", "theta", "H_U", "C_c", "C_sc", "R_sep", "R_sep_sec", "C_wtc"]
COMPCODE_COLUMNS = ["seed", "config_hash", "k", "n", "ell", "decoder", "rate", "in_window",
                    "P_e", "ci95_lo", "ci95_hi", "leakage_bits"]
COMPARE_COLUMNS = ["seed", "config_hash", "scheme", "p", "q", "theta", "k", "n", "rate", "P_e",
                   "leakage_bits", "reference_rate"]


class PropertyViolation(Exception):
    def __init__(self, message: str, result: dict):
        super().__init__(message)
        self.result = result


# config helpers


def _joint(cfg: dict) -> JointPMF:
    src = cfg.get("source", {"theta": 0.5})
    if "theta" in src:
        return doubly_symmetric(float(src["theta"]))
    if "independent" in src:
        return JointPMF.independent([float(x) for x in src["independent"]])
    if "joint" in src:
        return JointPMF.from_json(src["joint"])
    raise PreconditionError("source needs one of 'theta', 'independent', 'joint'")


def _params(cfg: dict, M: int) -> MawcParams:
    ch = cfg.get("channel", {})
    return MawcParams(int(ch.get("M", M)), float(ch.get("p", 0.0)), float(ch.get("q", 0.0)))


def _rate_value(v):
    return v.reason if isinstance(v, DegenerateRate) else v


def envelope(command: str, config: dict, seed: int, records: list, **extra) -> dict:
    doc = {"tool": "mawc", "version": __version__, "command": command, "config": config,
           "config_hash": config_hash(config), "seed": seed, "records": records}
    doc.update(extra)
    return doc


def strip_timing(doc: dict) -> dict:
    return {k: v for k, v in doc.items() if k != "timing"}


def _choose_ell(k: int, n: int, H_U: float, p: float, ell, force: bool) -> tuple[int, dict]:
    window = rate_window(k, n, min(H_U, 1.0), min(p, 0.5))
    if window.empty and not force:
        raise EmptyRateWindowError(window)
    if ell is None:
        # forced runs on an empty window fall back to the smallest ell above k H(U)
        ell = window.midpoint if not window.empty else max(1, window.ell_min)
    return int(ell), window.to_json()


def _leakage(code, joint, q, k, n, mode) -> tuple[dict | None, str | None]:
    if mode is False:
        return None, "disabled"
    try:
        return exact_total_leakage(code, joint, q, k, n).to_json(), None
    except BudgetExceededError as err:
        if mode == "auto":
            return None, str(err)
        raise


# subcommands


def run_rates(config: dict, seed: int = 0) -> str:
    """CSV of every rate formula over a grid.

    The grid is either ``config["grid"]`` (list of points) or the cartesian
    product of ``config["axes"]``.  ``H_U`` defaults to ``H(theta)``.
    """
    if "grid" in config:
        points = list(config["grid"])
    elif "axes" in config:
        axes = config["axes"]
        names = [n for n in ("p", "q", "theta", "H_U") if n in axes]
        points = [dict(zip(names, vals)) for vals in itertools.product(*(axes[n] for n in names))]
    else:
        points = []
    h = config_hash(config)
    rows = []
    for i, pt in enumerate(points):
        try:
            p, q, theta = float(pt["p"]), float(pt.get("q", 0.5)), float(pt.get("theta", 0.5))
            H_U = float(pt["H_U"]) if "H_U" in pt else binary_entropy(theta)
            RateQuery(p, q, H_U, theta)
            cc = computation_capacity(p, H_U)
            csc = secrecy_computation_capacity(p, H_U)
            rsep = separation_computation_rate(p, theta)
        except (KeyError, TypeError, ValueError) as err:
            raise PreconditionError(f"grid row {i} ({pt!r}): {err}") from err
        try:
            rsec = separation_secrecy_rate(p, q, theta)
        except PreconditionError:
            rsec = None
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            wtc = bsc_wiretap_secrecy_capacity(p, q)
        rows.append([seed, h, p, q, theta, H_U, _rate_value(cc), _rate_value(csc), _rate_value(rsep),
                     _rate_value(rsec), wtc])
    return csv_text(RATE_COLUMNS, rows, "rates")


def run_compcode(config: dict, seed: int = 0, workers: int = 1, force: bool = False) -> tuple[dict, str]:
    """Monte Carlo error rate plus exact leakage for one or more block sizes."""
    joint = _joint(config)
    params = _params(config, joint.M)
    decoder = config.get("decoder", "two_stage")
    blocks = config.get("blocks") or [[config.get("k", 4), config.get("n", 8)]]
    num_codes = int(config.get("num_codes", 10))
    trials = int(config.get("trials_per_code", 100))
    mode = config.get("leakage", "auto")
    H_U = entropy(function_pmf(joint))
    h = config_hash(config)
    records, rows = [], []
    for k, n in blocks:
        k, n = int(k), int(n)
        if decoder == "uncoded":
            ell, window = None, None
        else:
            ell, window = _choose_ell(k, n, H_U, params.p, config.get("ell"), force)
        sim = SimConfig(joint, params, k, n, ell, decoder)
        est = simulate_error_prob(sim, num_codes, trials, seed, workers=workers)
        leak, skipped = _leakage(code_for(sim, seed, 0), joint, params.q, k, n, mode)
        records.append({"k": k, "n": n, "ell": ell, "rate": k / n, "window": window,
                        "error": est.to_json(), "leakage_code0": leak, "leakage_skipped": skipped})
        lo, hi = est.ci
        rows.append([seed, h, k, n, ell, decoder, k / n, est.in_window, est.mean, lo, hi,
                     None if leak is None else leak["total_bits"]])
    return envelope("compcode", config, seed, records), csv_text(COMPCODE_COLUMNS, rows, "compcode")


def run_leakage(config: dict, seed: int = 0, force: bool = False) -> tuple[dict, str]:
    """Exact leakage of one public code (code index ``code_index`` of the seed)."""
    joint = _joint(config)
    params = _params(config, joint.M)
    k = int(config.get("k", 2))
    n = int(config.get("n", k))
    if config.get("uncoded", False):
        code, ell = None, None
    else:
        ell, _ = _choose_ell(k, n, entropy(function_pmf(joint)), params.p, config.get("ell"), force)
        code = code_for(SimConfig(joint, params, k, n, ell), seed, int(config.get("code_index", 0)))
    rep = exact_total_leakage(code, joint, params.q, k, n)
    rec = {"k": k, "n": n, "ell": ell, "code": None if code is None else code.to_json(), "leakage": rep.to_json()}
    row = [seed, config_hash(config), k, n, ell, "uncoded" if code is None else "public", k / n,
           None if code is None else code.in_window, None, None, None, rep.total_bits]
    return envelope("leakage", config, seed, [rec]), csv_text(COMPCODE_COLUMNS, [row], "leakage")


def run_theorem2(config: dict, seed: int = 0) -> dict:
    """Scan random and doubly-symmetric PMFs; raises :class:`PropertyViolation` on any disagreement."""
    rep = theorem2_scan(int(config.get("num_trials", 10_000)), seed, tol=float(config.get("tol", 1e-9)),
                        grid_points=int(config.get("grid_points", 101)), checker=SCAN_CHECKER)
    doc = envelope("theorem2", config, seed, [rep.to_json()], ok=rep.ok)
    if not rep.ok:
        raise PropertyViolation(f"{len(rep.disagreements)} disagreements", doc)
    return doc


def run_separation_compare(config: dict, seed: int = 0, workers: int = 1,
                           force: bool = False) -> tuple[dict, str]:
    """Joint computation code and separation pipeline side by side.

    A requested binning layer (``rand_len > 0``) needs a degraded eavesdropper;
    without it the secrecy reference of the separation scheme is left empty.
    """
    theta = float(config.get("theta", 0.5))
    ch = config.get("channel", {})
    p, q = float(ch.get("p", 0.0)), float(ch.get("q", 0.0))
    params = MawcParams(2, p, q)
    k = int(config.get("k", 2))
    rand_len = int(config.get("rand_len", 0))
    if rand_len > 0 and degradedness_gap(p, q) is None and not force:
        raise PreconditionError(f"wiretap layer requested but the degradedness condition fails for p={p}, q={q}")
    joint = doubly_symmetric(theta)
    H_U = binary_entropy(theta)
    h = config_hash(config)

    jc = config.get("joint", {})
    n_joint = int(jc.get("n", k))
    decoder = jc.get("decoder", "uncoded" if p == 0.0 and n_joint == k else "joint_ml")
    ell = None
    if decoder != "uncoded":
        ell, _ = _choose_ell(k, n_joint, H_U, p, jc.get("ell"), force)
    sim = SimConfig(joint, params, k, n_joint, ell, decoder)
    est = simulate_error_prob(sim, int(jc.get("num_codes", 10)), int(jc.get("trials_per_code", 100)),
                              seed, workers=workers)
    leak, skipped = _leakage(code_for(sim, seed, 0), joint, q, k, n_joint, "auto")
    c_sc = _rate_value(secrecy_computation_capacity(min(p, 0.5), H_U))
    joint_rec = {"scheme": "joint", "p": p, "q": q, "theta": theta, "k": k, "n": n_joint, "ell": ell,
                 "decoder": decoder, "rate": k / n_joint, "error": est.to_json(), "leakage": leak,
                 "leakage_skipped": skipped, "reference_rate": c_sc}

    sc = SeparationConfig(theta, params, k, int(config.get("ell", k)),
                          config.get("n_per_terminal"), rand_len)
    try:
        sep = separation_pipeline(sc, int(config.get("num_trials", 1000)), seed)
        sep_doc = sep.to_json()
    except BudgetExceededError as err:
        sep = separation_pipeline(sc, int(config.get("num_trials", 1000)), seed, leakage=False)
        sep_doc = dict(sep.to_json(), leakage_skipped=str(err))

    rows = [
        [seed, h, "joint", p, q, theta, k, n_joint, k / n_joint, est.mean,
         None if leak is None else leak["total_bits"], c_sc],
        [seed, h, "separation", p, q, theta, k, sc.n, sep.rate, sep.error_rate, sep.total_leakage,
         sep.reference_rate],
    ]
    doc = envelope("separation", config, seed, [joint_rec, sep_doc])
    return doc, csv_text(COMPARE_COLUMNS, rows, "separation")


# entry point


def _error_doc(kind: str, err: Exception, **fields) -> str:
    return dumps({"error": dict(kind=kind, message=str(err), **fields)})


def _write(text: str, path: str | None) -> None:
    if path is None:
        sys.stdout.write(text if text.endswith("\n") else text + "\n")
    else:
        Path(path).write_text(text if text.endswith("\n") else text + "\n")


def _emit(doc: dict, csv: str | None, out: str | None, started: float) -> None:
    doc = dict(doc, timing={"wall_clock_s": time.perf_counter() - started,
                            "finished_at": datetime.now(timezone.utc).isoformat()})
    _write(dumps(doc), out)
    if out is not None and csv is not None:
        _write(csv, str(Path(out).with_suffix(".csv")))


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="mawc", description="Secure computation over the modulo-2 adder wiretap channel")
    parser.add_argument("--version", action="version", version=f"mawc {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_text in [("rates", "tabulate rate formulas over a grid (CSV)"),
                            ("compcode", "simulate the joint computation code"),
                            ("leakage", "exact leakage of one public code"),
                            ("theorem2", "doubly-symmetric equivalence scan"),
                            ("separation", "joint scheme vs separation baseline")]:
        sp = sub.add_parser(name, help=help_text)
        sp.add_argument("--config", help="JSON config file")
        sp.add_argument("--seed", type=int, help="master seed (overrides config)")
        sp.add_argument("--out", help="output path; CSV summary goes next to it")
        sp.add_argument("--workers", type=int, default=1)
        sp.add_argument("--force", action="store_true", help="run even if the rate window is empty")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    started = time.perf_counter()
    try:
        config: dict[str, Any] = json.loads(Path(args.config).read_text()) if args.config else {}
        seed = args.seed if args.seed is not None else int(config.get("seed", 0))
        if args.command == "rates":
            _write(run_rates(config, seed), args.out)
        elif args.command == "compcode":
            _emit(*run_compcode(config, seed, args.workers, args.force), args.out, started)
        elif args.command == "leakage":
            _emit(*run_leakage(config, seed, args.force), args.out, started)
        elif args.command == "theorem2":
            _emit(run_theorem2(config, seed), None, args.out, started)
        else:
            _emit(*run_separation_compare(config, seed, args.workers, args.force), args.out, started)
    except EmptyRateWindowError as err:
        sys.stderr.write(_error_doc("empty_rate_window", err, window=err.window.to_json()) + "\n")
        return EXIT_PRECONDITION
    except BudgetExceededError as err:
        sys.stderr.write(_error_doc("budget_exceeded", err, required=err.required, cap=err.cap) + "\n")
        return EXIT_BUDGET
    except PropertyViolation as err:
        _emit(err.result, None, args.out, started)
        sys.stderr.write(_error_doc("property_violation", err) + "\n")
        return EXIT_PROPERTY
    except (PreconditionError, ValueError, KeyError, OSError) as err:
        sys.stderr.write(_error_doc("precondition", err) + "\n")
        return EXIT_PRECONDITION
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
