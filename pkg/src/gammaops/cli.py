"""Batch front door: JSON pairs in, machine-readable reports out.

Pair files carry complex matrices as nested arrays of [re, im] pairs under
schema_version "1".  Exit codes are a total function of the verdicts:

    analyze   0 ok, 2 not a valid pair for this geometry, 3 numerical
              contract breach, 1 malformed input
    compare   0 equivalent, 4 conclusively distinct, 5 inconclusive,
              6 purity violation, 1 malformed input
    generate  0 written, 1 bad parameters or unwritable path

The environment variable GAMMAOPS_SEED overrides the built-in default seed
wherever no explicit --seed is given.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
import time

import numpy as np

from . import __version__, matcore
from .exceptions import (
    DimensionMismatch,
    GammaOpsError,
    NotCommuting,
    NotContraction,
    NotPure,
    NumericalContractBreach,
    PairFileError,
    TruncationCapExceeded,
)
from .fundamental import check_pf_intertwining, solve_fundamental
from .gamma_pair import (
    is_pure,
    random_gamma_unitary,
    random_pure_gamma,
    validate,
    vn_probe,
)
from .invariant import (
    SEARCH_DISTINCT,
    SEARCH_FOUND,
    VERDICT_EQUIVALENT,
    VERDICT_NOT_EQUIVALENT,
    Witness,
    search_witness,
    trace_word_screen,
    verify_equivalence,
)
from .model import verify_model

SCHEMA_VERSION = "1"
DEFAULT_SEED = 0

EXIT_OK = 0
EXIT_INPUT = 1
EXIT_NOT_GAMMA = 2
EXIT_BREACH = 3
EXIT_DISTINCT = 4
EXIT_INCONCLUSIVE = 5
EXIT_NOT_PURE = 6

RESIDUAL_BREACH_TOL = 1e-8
RADIUS_BREACH_TOL = 1e-8
MODEL_BREACH_TOL = 1e-7

VERDICT_INCONCLUSIVE = "INCONCLUSIVE"


def _num(x, path: str) -> float:
    if isinstance(x, bool) or not isinstance(x, (int, float)):
        raise PairFileError(f"{path}: expected a number, got {type(x).__name__}")
    if not math.isfinite(x):
        raise PairFileError(f"{path}: non-finite value")
    return float(x)


def matrix_from_json(node, name: str) -> np.ndarray:
    """Parse a nested array of [re, im] pairs, diagnosing the failing field."""
    if not isinstance(node, list) or not node:
        raise PairFileError(f"{name}: expected a non-empty array of rows")
    rows = []
    width = None
    for i, row in enumerate(node):
        if not isinstance(row, list) or not row:
            raise PairFileError(f"{name}[{i}]: expected a non-empty row array")
        if width is None:
            width = len(row)
        elif len(row) != width:
            raise PairFileError(
                f"{name}[{i}]: ragged row, expected {width} entries, "
                f"got {len(row)}")
        out = []
        for j, cell in enumerate(row):
            if not isinstance(cell, list) or len(cell) != 2:
                raise PairFileError(f"{name}[{i}][{j}]: expected [re, im] pair")
            out.append(complex(_num(cell[0], f"{name}[{i}][{j}][0]"),
                               _num(cell[1], f"{name}[{i}][{j}][1]")))
        rows.append(out)
    return np.array(rows, dtype=complex)


def matrix_to_json(m) -> list:
    m = np.atleast_2d(np.asarray(m, dtype=complex))
    return [[[float(z.real), float(z.imag)] for z in row] for row in m]


def _read_json_doc(path: str) -> dict:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise PairFileError(f"{path}: {exc.strerror or exc}") from exc
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise PairFileError(
            f"{path}: invalid JSON at line {exc.lineno} column {exc.colno}: "
            f"{exc.msg}") from exc
    if not isinstance(doc, dict):
        raise PairFileError(f"{path}: top level must be an object")
    return doc


def load_pair_file(path: str) -> tuple[np.ndarray, np.ndarray, dict]:
    """Read and validate a pair file, returning (S, P, metadata)."""
    doc = _read_json_doc(path)
    version = doc.get("schema_version")
    if version is None:
        raise PairFileError("schema_version: missing required field")
    if version != SCHEMA_VERSION:
        raise PairFileError(
            f"schema_version: expected \"{SCHEMA_VERSION}\", got {version!r}")
    mats = {}
    for key in ("S", "P"):
        if key not in doc:
            raise PairFileError(f"{key}: missing required field")
        m = matrix_from_json(doc[key], key)
        if m.shape[0] != m.shape[1]:
            raise PairFileError(
                f"{key}: must be square, got {m.shape[0]}x{m.shape[1]}")
        mats[key] = m
    if mats["S"].shape != mats["P"].shape:
        raise PairFileError(
            f"S and P: dimensions differ, {mats['S'].shape[0]} vs "
            f"{mats['P'].shape[0]}")
    metadata = doc.get("metadata")
    if not isinstance(metadata, dict):
        metadata = {}
    return mats["S"], mats["P"], metadata


def pair_file_doc(s, p, metadata: dict | None = None) -> dict:
    doc = {"schema_version": SCHEMA_VERSION,
           "S": matrix_to_json(s), "P": matrix_to_json(p)}
    if metadata:
        doc["metadata"] = metadata
    return doc


def load_witness_file(path: str) -> Witness:
    """Read a witness file: eta1 and sigma required, sigma_star defaults to eta1."""
    doc = _read_json_doc(path)
    if "eta1" not in doc:
        raise PairFileError("eta1: missing required field")
    if "sigma" not in doc:
        raise PairFileError("sigma: missing required field")
    eta1 = matrix_from_json(doc["eta1"], "eta1")
    sigma = matrix_from_json(doc["sigma"], "sigma")
    sigma_star = (matrix_from_json(doc["sigma_star"], "sigma_star")
                  if "sigma_star" in doc else eta1)
    u_ambient = (matrix_from_json(doc["U"], "U") if "U" in doc else None)
    try:
        return Witness(eta1=eta1, sigma=sigma, sigma_star=sigma_star,
                       u_ambient=u_ambient)
    except ValueError as exc:
        raise PairFileError(f"{path}: {exc}") from exc


def _resolve_seed(explicit: int | None) -> int:
    if explicit is not None:
        return explicit
    env = os.environ.get("GAMMAOPS_SEED")
    if env is not None:
        try:
            return int(env)
        except ValueError as exc:
            raise PairFileError(
                f"GAMMAOPS_SEED: expected an integer, got {env!r}") from exc
    return DEFAULT_SEED


def _emit(report: dict, json_path: str | None) -> None:
    text = json.dumps(report, indent=2, sort_keys=True) + "\n"
    if json_path:
        try:
            with open(json_path, "w", encoding="utf-8") as fh:
                fh.write(text)
        except OSError as exc:
            raise PairFileError(f"{json_path}: {exc.strerror or exc}") from exc
    else:
        sys.stdout.write(text)


def _tool_block() -> dict:
    return {"name": "gammaops", "version": __version__}


def _flags_block(pair) -> dict:
    fl = pair.flags
    return {
        "commuting": fl.commuting,
        "contraction": fl.contraction,
        "s_bound": fl.s_bound,
        "spectrum_in_gamma": fl.spectrum_in_gamma,
        "pure": fl.pure,
        "vn_probe_passed": fl.vn_probe_passed,
        "necessary_ok": pair.necessary_ok,
    }


def cmd_analyze(args) -> int:
    t0 = time.perf_counter()
    seed = _resolve_seed(args.seed)
    s, p, metadata = load_pair_file(args.input)
    report = {
        "tool": _tool_block(),
        "input": {"path": args.input, "n": int(s.shape[0]),
                  "metadata": metadata},
        "seed": seed,
    }
    try:
        pair = validate(s, p)
    except NotCommuting as exc:
        report["error"] = str(exc)
        report["verdict"] = "not-gamma-contraction"
        report["elapsed_s"] = time.perf_counter() - t0
        _emit(report, args.json)
        return EXIT_NOT_GAMMA

    probe = vn_probe(pair, trials=args.vn_trials, seed=seed)
    report["probe"] = {
        "worst_ratio": probe.worst_ratio,
        "certified_not_gamma": probe.certified_not_gamma,
        "trials": probe.trials,
        "max_deg": probe.max_deg,
        "certificate": (matrix_to_json(probe.worst_coeffs)
                        if probe.certified_not_gamma else None),
    }
    report["flags"] = _flags_block(pair)
    report["joint_spectrum"] = [
        {"s": [pt.s.real, pt.s.imag], "p": [pt.p.real, pt.p.imag]}
        for pt in pair.joint_spectrum]

    breaches = []
    fp = None
    try:
        fp = solve_fundamental(pair)
        pf_res = check_pf_intertwining(pair, fp)
        scale = 1.0 + pair.norm_s
        report["fundamental"] = {
            "F": matrix_to_json(fp.f),
            "F_star": matrix_to_json(fp.f_star),
            "residual_f": fp.residual_f,
            "residual_f_star": fp.residual_f_star,
            "w_f": fp.w_f,
            "w_f_star": fp.w_f_star,
            "pf_intertwine": pf_res,
        }
        if fp.residual_f > RESIDUAL_BREACH_TOL * scale:
            breaches.append(f"fundamental equation residual {fp.residual_f:.3e}")
        if fp.residual_f_star > RESIDUAL_BREACH_TOL * scale:
            breaches.append(
                f"adjoint fundamental equation residual {fp.residual_f_star:.3e}")
        if fp.w_f > 1.0 + RADIUS_BREACH_TOL:
            breaches.append(f"numerical radius of F is {fp.w_f:.12g}")
        if fp.w_f_star > 1.0 + RADIUS_BREACH_TOL:
            breaches.append(f"numerical radius of F_star is {fp.w_f_star:.12g}")
        if pf_res > RESIDUAL_BREACH_TOL * scale:
            breaches.append(f"PF intertwining residual {pf_res:.3e}")
    except NotContraction as exc:
        report["fundamental"] = None
        report["error"] = str(exc)
    except NumericalContractBreach as exc:
        report["fundamental"] = None
        breaches.append(str(exc))

    report["model"] = None
    if (fp is not None and pair.flags.pure and pair.necessary_ok
            and not probe.certified_not_gamma):
        try:
            md = verify_model(pair, n_trunc=args.trunc, fp=fp)
            report["model"] = {
                "n_trunc": md.n_trunc,
                "tail": md.tail,
                "residuals": {k: float(v) for k, v in md.residuals.items()},
            }
            # explicit shallow truncations legitimately carry O(tail) error
            scale = 1.0 + pair.norm_s
            limit = MODEL_BREACH_TOL * scale + 10.0 * md.tail * scale
            for key, value in md.residuals.items():
                if value > limit:
                    breaches.append(f"model residual {key} = {value:.3e}")
        except TruncationCapExceeded as exc:
            breaches.append(str(exc))

    report["breaches"] = breaches
    if not pair.necessary_ok or probe.certified_not_gamma:
        report["verdict"] = "not-gamma-contraction"
        code = EXIT_NOT_GAMMA
    elif breaches:
        report["verdict"] = "numerical-contract-breach"
        code = EXIT_BREACH
    else:
        report["verdict"] = "ok"
        code = EXIT_OK
    report["elapsed_s"] = time.perf_counter() - t0
    _emit(report, args.json)
    return code


def _witness_block(w: Witness) -> dict:
    block = {
        "eta1": matrix_to_json(w.eta1),
        "sigma": matrix_to_json(w.sigma),
        "sigma_star": matrix_to_json(w.sigma_star),
    }
    if w.u_ambient is not None:
        block["U"] = matrix_to_json(w.u_ambient)
    return block


def _equivalence_block(rep) -> dict:
    block = {
        "verdict": rep.verdict,
        "conclusive": rep.conclusive,
        "reason": rep.reason,
        "fstar_residual": rep.fstar_residual,
    }
    if rep.coincidence is not None:
        block["coincidence"] = {
            "max_residual": rep.coincidence.max_residual,
            "ranks_match": rep.coincidence.ranks_match,
        }
    if rep.model_confirmation is not None:
        block["model_confirmation"] = dict(rep.model_confirmation)
    return block


def cmd_compare(args) -> int:
    t0 = time.perf_counter()
    seed = _resolve_seed(args.seed)
    s_a, p_a, meta_a = load_pair_file(args.input_a)
    s_b, p_b, meta_b = load_pair_file(args.input_b)
    report = {
        "tool": _tool_block(),
        "inputs": [
            {"path": args.input_a, "n": int(s_a.shape[0]), "metadata": meta_a},
            {"path": args.input_b, "n": int(s_b.shape[0]), "metadata": meta_b},
        ],
        "seed": seed,
    }
    try:
        pair_a = validate(s_a, p_a)
        pair_b = validate(s_b, p_b)
        fp_a = solve_fundamental(pair_a)
        fp_b = solve_fundamental(pair_b)
    except (NotCommuting, NotContraction, NumericalContractBreach) as exc:
        raise PairFileError(f"not a usable pair: {exc}") from exc
    if not (is_pure(pair_a.p) and is_pure(pair_b.p)):
        report["verdict"] = "purity-violation"
        report["elapsed_s"] = time.perf_counter() - t0
        _emit(report, args.json)
        return EXIT_NOT_PURE

    screen = trace_word_screen(fp_a, fp_b)
    report["screen"] = {
        "max_gap": screen.max_gap,
        "mismatch": screen.mismatch,
        "worst_word": screen.worst_word,
    }
    if screen.mismatch:
        report["verdict"] = VERDICT_NOT_EQUIVALENT
        report["conclusive"] = True
        report["elapsed_s"] = time.perf_counter() - t0
        _emit(report, args.json)
        return EXIT_DISTINCT

    if args.witness:
        witness = load_witness_file(args.witness)
        report["witness_source"] = "file"
        try:
            rep = verify_equivalence(pair_a, pair_b, witness,
                                     fp_a=fp_a, fp_b=fp_b)
        except DimensionMismatch as exc:
            raise PairFileError(f"witness does not fit the pairs: {exc}") from exc
        report["witness"] = _witness_block(witness)
        report["equivalence"] = _equivalence_block(rep)
        report["verdict"] = (rep.verdict if rep.equivalent or rep.conclusive
                             else VERDICT_INCONCLUSIVE)
        report["elapsed_s"] = time.perf_counter() - t0
        _emit(report, args.json)
        if rep.equivalent:
            return EXIT_OK
        return EXIT_DISTINCT if rep.conclusive else EXIT_INCONCLUSIVE

    result = search_witness(pair_a, pair_b, restarts=args.search, seed=seed)
    report["witness_source"] = "search"
    report["search"] = {"status": result.status,
                        "restarts_used": result.restarts_used}
    if result.report is not None:
        report["equivalence"] = _equivalence_block(result.report)
    if result.status == SEARCH_FOUND:
        report["witness"] = _witness_block(result.witness)
        report["verdict"] = VERDICT_EQUIVALENT
        code = EXIT_OK
    elif result.status == SEARCH_DISTINCT:
        report["verdict"] = VERDICT_NOT_EQUIVALENT
        report["conclusive"] = True
        code = EXIT_DISTINCT
    else:
        report["verdict"] = VERDICT_INCONCLUSIVE
        code = EXIT_INCONCLUSIVE
    report["elapsed_s"] = time.perf_counter() - t0
    _emit(report, args.json)
    return code


def cmd_generate(args) -> int:
    if args.dim < 1:
        print("error: --dim must be at least 1", file=sys.stderr)
        return EXIT_INPUT
    seed = _resolve_seed(args.seed)
    if args.kind == "symmetrized":
        # 0.85 keeps rho(P) <= 0.7225 so auto truncation stays desk-sized
        pair = random_pure_gamma(args.dim, seed, max_norm=0.85)
    else:
        pair = random_gamma_unitary(args.dim, seed)
    metadata = {"kind": args.kind, "seed": seed,
                "label": f"{args.kind}-n{args.dim}-seed{seed}"}
    doc = pair_file_doc(pair.s, pair.p, metadata)
    text = json.dumps(doc, indent=2, sort_keys=True) + "\n"
    if args.out:
        try:
            with open(args.out, "w", encoding="utf-8") as fh:
                fh.write(text)
        except OSError as exc:
            print(f"error: {args.out}: {exc.strerror or exc}", file=sys.stderr)
            return EXIT_INPUT
    else:
        sys.stdout.write(text)
    return EXIT_OK


def _trunc_arg(value: str):
    if value == "auto":
        return "auto"
    try:
        return int(value)
    except ValueError:
        raise argparse.ArgumentTypeError(
            f"expected an integer or 'auto', got {value!r}")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gammaops",
        description="Diagnostics for commuting operator pairs on the "
                    "symmetrized bidisc.")
    parser.add_argument("--version", action="version",
                        version=f"gammaops {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    pa = sub.add_parser("analyze", help="full diagnostic pipeline on one pair")
    pa.add_argument("input", help="pair file (JSON)")
    pa.add_argument("--trunc", type=_trunc_arg, default="auto",
                    help="model truncation: block count or 'auto'")
    pa.add_argument("--vn-trials", type=int, default=200,
                    help="random polynomials in the spectral-set probe")
    pa.add_argument("--seed", type=int, default=None,
                    help="probe seed (default: GAMMAOPS_SEED or 0)")
    pa.add_argument("--json", default=None, metavar="PATH",
                    help="write the report here instead of stdout")
    pa.set_defaults(func=cmd_analyze)

    pc = sub.add_parser("compare", help="decide unitary equivalence of two pairs")
    pc.add_argument("input_a", help="first pair file")
    pc.add_argument("input_b", help="second pair file")
    group = pc.add_mutually_exclusive_group()
    group.add_argument("--witness", default=None, metavar="PATH",
                       help="witness file with eta1/sigma/sigma_star")
    group.add_argument("--search", type=int, default=20, metavar="RESTARTS",
                       help="heuristic witness search restarts (default 20)")
    pc.add_argument("--seed", type=int, default=None,
                    help="search seed (default: GAMMAOPS_SEED or 0)")
    pc.add_argument("--json", default=None, metavar="PATH",
                    help="write the report here instead of stdout")
    pc.set_defaults(func=cmd_compare)

    pg = sub.add_parser("generate", help="write a random pair file")
    pg.add_argument("--dim", type=int, required=True, help="matrix size")
    pg.add_argument("--seed", type=int, default=None,
                    help="generator seed (default: GAMMAOPS_SEED or 0)")
    pg.add_argument("--kind", choices=("symmetrized", "gamma-unitary"),
                    default="symmetrized")
    pg.add_argument("--out", default=None, metavar="PATH",
                    help="output path (default: stdout)")
    pg.set_defaults(func=cmd_generate)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except PairFileError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except NotPure as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NOT_PURE
    except NumericalContractBreach as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BREACH
    except GammaOpsError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


def console_main() -> None:
    sys.exit(main())


if __name__ == "__main__":
    console_main()
