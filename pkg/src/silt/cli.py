"""Command line front end.

Every subcommand resolves its options (flags win over an optional JSON
config file), runs deterministically given that resolved config, writes
outputs atomically, and records a manifest with per-output checksums next
to each output file, so any run can be replayed and verified byte for byte
with `silt reproduce`.

Exit codes: 0 success, 2 configuration error, 3 numerical budget failure,
4 failed check (--assert mode or reproduce mismatch).
"""
from __future__ import annotations

import argparse
import hashlib
import json
import math
import os
import sys
import tempfile
import time

import numpy as np

from . import __version__
from .contour import (
    BUILTIN_SERIES_NAMES,
    RenewalLaw,
    SeriesSpec,
    builtin_series,
    cauchy_coefficient,
    deviation_bound_check,
    extract_to_tolerance,
    renewal_moment_profile,
    renewal_series,
    verify_darboux,
)
from .errors import BudgetError, LawError
from .laws import StepLaw, aperiodicity_witness, make_law, truncated_zipf_pmf
from .mc import expectation_trend, mc_moments
from .moments import variance_components, convolution_powers, variance_enumeration
from .paths import simulate_path, vn_profile
from .quad import identity_suite, kappa_quadrature, load_kappa_fixture, variance_limit_constant
from .rwrs import quenched_clt_test

OUT_DIR_ENV = "SILT_OUT_DIR"


class CheckFailure(Exception):
    """A requested assertion did not hold (exit code 4)."""


def _fmt(x) -> str:
    return format(float(x), ".17g")


def _resolve_out(path: str | None) -> str | None:
    if path is None:
        return None
    if os.path.isabs(path):
        return path
    return os.path.join(os.environ.get(OUT_DIR_ENV, "."), path)


def _atomic_write(path: str, text: str) -> None:
    directory = os.path.dirname(path) or "."
    os.makedirs(directory, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=directory, suffix=".part")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _csv_text(header, rows) -> str:
    lines = [",".join(header)]
    for row in rows:
        cells = []
        for key in header:
            val = row[key]
            if isinstance(val, bool):
                cells.append(str(int(val)))
            elif isinstance(val, (int, np.integer)):
                cells.append(str(int(val)))
            elif isinstance(val, float):
                cells.append(_fmt(val))
            else:
                cells.append(str(val))
        lines.append(",".join(cells))
    return "\n".join(lines) + "\n"


def _json_text(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def _sha256(path: str) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for block in iter(lambda: fh.read(65536), b""):
            h.update(block)
    return h.hexdigest()


def _write_manifest(cfg: dict, files: list[str], started: float) -> str:
    manifest = {
        "tool": "silt",
        "version": __version__,
        "config": cfg,
        "wall_clock_s": time.time() - started,
        "outputs": [
            {"file": os.path.basename(f), "sha256": _sha256(f)} for f in files
        ],
    }
    path = files[0] + ".manifest.json"
    _atomic_write(path, _json_text(manifest))
    return path


# ---------------------------------------------------------------------------
# law descriptors
# ---------------------------------------------------------------------------


def parse_law(descriptor) -> StepLaw:
    """Build a step law from a CLI descriptor.

    Accepts "zipf1d", "lazy2d"/"lazy_srw_2d", "zipftrunc:R" (the radius-R
    truncation, renormalized), "file:<path>" pointing to JSON with keys
    d/support/probs, or an equivalent inline dict.
    """
    if isinstance(descriptor, dict):
        return _law_from_dict(descriptor, "<inline>")
    text = str(descriptor)
    if text in ("zipf1d",):
        return make_law("zipf1d")
    if text in ("lazy2d", "lazy_srw_2d"):
        return make_law("lazy_srw_2d")
    if text.startswith("zipftrunc:"):
        radius = int(text.split(":", 1)[1])
        support, probs = truncated_zipf_pmf(radius)
        return make_law("finite_custom", support=support, probs=probs)
    if text.startswith("file:") or text.endswith(".json"):
        path = text[5:] if text.startswith("file:") else text
        try:
            with open(path) as fh:
                payload = json.load(fh)
        except OSError as e:
            raise LawError(f"cannot read law file {path}: {e}") from e
        except json.JSONDecodeError as e:
            raise LawError(f"law file {path} is not valid JSON (line {e.lineno})") from e
        return _law_from_dict(payload, path)
    raise LawError(
        f"unknown law {text!r}; expected zipf1d, lazy2d, zipftrunc:R, or file:<path>"
    )


def _law_from_dict(payload: dict, origin: str) -> StepLaw:
    for field in ("support", "probs"):
        if field not in payload:
            raise LawError(f"law file {origin}: missing field {field!r}")
    return make_law("finite_custom", support=payload["support"], probs=payload["probs"])


def parse_renewal_law(text: str) -> RenewalLaw:
    if text.startswith("geometric:"):
        return RenewalLaw.geometric(float(text.split(":", 1)[1]))
    if text.startswith("fixed:"):
        return RenewalLaw.fixed(int(text.split(":", 1)[1]))
    if text.startswith("file:") or text.endswith(".json"):
        path = text[5:] if text.startswith("file:") else text
        try:
            with open(path) as fh:
                payload = json.load(fh)
        except OSError as e:
            raise LawError(f"cannot read renewal law file {path}: {e}") from e
        except json.JSONDecodeError as e:
            raise LawError(f"renewal file {path} is not valid JSON (line {e.lineno})") from e
        if "probs" not in payload:
            raise LawError(f"renewal file {path}: missing field 'probs'")
        return RenewalLaw.from_probs(payload["probs"], name=os.path.basename(path))
    raise LawError(f"unknown renewal law {text!r}; expected geometric:p, fixed:k, or file:<path>")


def _parse_series(descriptor: str) -> SeriesSpec:
    if descriptor in BUILTIN_SERIES_NAMES:
        return builtin_series(descriptor)[0]
    if descriptor.startswith("file:") or descriptor.endswith(".json"):
        path = descriptor[5:] if descriptor.startswith("file:") else descriptor
        try:
            with open(path) as fh:
                payload = json.load(fh)
        except OSError as e:
            raise LawError(f"cannot read series file {path}: {e}") from e
        except json.JSONDecodeError as e:
            raise LawError(f"series file {path} is not valid JSON (line {e.lineno})") from e
        kind = payload.get("kind")
        if kind == "polynomial":
            coeffs = np.asarray(payload["coefficients"], dtype=np.float64)
            return SeriesSpec(
                f"polynomial[{len(coeffs) - 1}]",
                lambda z: np.polynomial.polynomial.polyval(z, coeffs),
            )
        if kind == "renewal":
            law = parse_renewal_law(payload["law"])
            return renewal_series(law, payload.get("which", "mean"))
        raise LawError(f"series file {path}: unknown kind {kind!r}")
    raise LawError(
        f"unknown series {descriptor!r}; builtins are {BUILTIN_SERIES_NAMES}"
    )


def _int_list(text: str) -> list[int]:
    try:
        return [int(tok) for tok in str(text).split(",") if tok != ""]
    except ValueError as e:
        raise LawError(f"expected a comma-separated integer list, got {text!r}") from e


# ---------------------------------------------------------------------------
# runners (one per subcommand; each consumes a resolved config dict)
# ---------------------------------------------------------------------------


def run_laws_inspect(cfg: dict) -> tuple[str, list[str]]:
    law = parse_law(cfg["law"])
    payload = {
        "name": law.name,
        "d": law.d,
        "gamma": law.gamma,
        "covariance": None if law.covariance is None else np.asarray(law.covariance).tolist(),
        "max_step": law.max_step(),
        "support_size": None if law.support is None else int(len(law.support)),
        "charfn_max_off_origin": aperiodicity_witness(law),
    }
    text = _json_text(payload)
    files = []
    if cfg["out"]:
        _atomic_write(cfg["out"], text)
        files.append(cfg["out"])
    return text, files


def run_walk_simulate(cfg: dict) -> tuple[str, list[str]]:
    law = parse_law(cfg["law"])
    path = simulate_path(law, int(cfg["n"]), int(cfg["seed"]))
    profile = vn_profile(path)
    rows = []
    if law.d == 1:
        header = ["step", "x", "vn"]
        for m in range(path.n + 1):
            rows.append({"step": m, "x": int(path.sites[m]), "vn": int(profile[m])})
    else:
        header = ["step", "x", "y", "vn"]
        for m in range(path.n + 1):
            rows.append(
                {
                    "step": m,
                    "x": int(path.sites[m, 0]),
                    "y": int(path.sites[m, 1]),
                    "vn": int(profile[m]),
                }
            )
    text = _csv_text(header, rows)
    files = []
    if cfg["out"]:
        _atomic_write(cfg["out"], text)
        files.append(cfg["out"])
    return f"simulated {path.n} steps of {law.name}, V_n={int(profile[-1])}\n", files


def run_variance_exact(cfg: dict) -> tuple[str, list[str]]:
    law = parse_law(cfg["law"])
    n_max = int(cfg["n_max"])
    box = None if cfg["box"] is None else int(cfg["box"])
    eps = float(cfg["eps_mass"])
    pmfs = convolution_powers(law, n_max, box=box, eps_mass=eps)
    header = ["n", "a2", "a3", "b2", "b3", "var", "var_over_n2"]
    rows = []
    for n in range(1, n_max + 1):
        dec = variance_components(law, n, pmfs=pmfs, cap=max(n_max, 64))
        rows.append(
            {
                "n": n,
                "a2": dec.a2,
                "a3": dec.a3,
                "b2": dec.b2,
                "b3": dec.b3,
                "var": dec.var,
                "var_over_n2": dec.var / n**2,
            }
        )
    text = _csv_text(header, rows)
    files = []
    if cfg["out"]:
        _atomic_write(cfg["out"], text)
        files.append(cfg["out"])
    stdout = text if not cfg["out"] else f"wrote {len(rows)} rows to {cfg['out']}\n"
    if cfg["assert_mode"]:
        for n in range(1, min(8, n_max) + 1):
            oracle = variance_enumeration(law, n)
            formula = next(r["var"] for r in rows if r["n"] == n)
            tol = 1e-10 * max(1.0, abs(oracle["var"]))
            if abs(formula - oracle["var"]) > tol:
                raise CheckFailure(
                    f"decomposition vs enumeration mismatch at n={n}: "
                    f"{formula!r} vs {oracle['var']!r}"
                )
    return stdout, files


def run_variance_mc(cfg: dict) -> tuple[str, list[str]]:
    law = parse_law(cfg["law"])
    header = ["n", "reps", "mean", "var", "var_over_n2", "ci"]
    rows = []
    for n in _int_list(cfg["n"]):
        s = mc_moments(law, n, int(cfg["reps"]), int(cfg["seed"]), int(cfg["workers"]))
        rows.append(
            {
                "n": n,
                "reps": s.reps,
                "mean": s.mean_vn,
                "var": s.var_vn,
                "var_over_n2": s.var_vn / n**2,
                "ci": s.var_ci / n**2,
            }
        )
    text = _csv_text(header, rows)
    files = []
    if cfg["out"]:
        _atomic_write(cfg["out"], text)
        files.append(cfg["out"])
    return text if not cfg["out"] else f"wrote {len(rows)} rows to {cfg['out']}\n", files


def run_expectation_trend(cfg: dict) -> tuple[str, list[str]]:
    law = parse_law(cfg["law"])
    report = expectation_trend(law, _int_list(cfg["n"]))
    header = ["n", "ev", "ratio", "target"]
    text = _csv_text(header, report["rows"])
    files = []
    if cfg["out"]:
        _atomic_write(cfg["out"], text)
        files.append(cfg["out"])
    return text if not cfg["out"] else f"wrote {len(report['rows'])} rows to {cfg['out']}\n", files


def run_contour_extract(cfg: dict) -> tuple[str, list[str]]:
    series = _parse_series(cfg["series"])
    if cfg["points"] is not None:
        est = cauchy_coefficient(series, int(cfg["n"]), int(cfg["points"]))
    else:
        est = extract_to_tolerance(series, int(cfg["n"]), float(cfg["tol"]))
    payload = {
        "series": series.name,
        "n": est.n,
        "value": est.value,
        "radius": est.radius,
        "m_points": est.m_points,
        "aliasing_bound": est.aliasing_bound,
        "imag_residual": est.imag_residual,
    }
    text = _json_text(payload)
    files = []
    if cfg["out"]:
        _atomic_write(cfg["out"], text)
        files.append(cfg["out"])
    return text, files


def _darboux_grid(n_max: int) -> list[int]:
    ns = set(range(1, min(64, n_max) + 1))
    n = 64
    while n < n_max:
        ns.add(n)
        n *= 2
    ns.add(n_max)
    return sorted(x for x in ns if x <= n_max)


def run_darboux_verify(cfg: dict) -> tuple[str, list[str]]:
    name = cfg["series"]
    if name not in BUILTIN_SERIES_NAMES:
        raise LawError(f"darboux verify runs on builtins only: {BUILTIN_SERIES_NAMES}")
    series, hyp, _ = builtin_series(name)
    report = verify_darboux(series, hyp, _darboux_grid(int(cfg["n_max"])))
    header = ["n", "coeff", "bound", "aliasing", "margin", "ok"]
    text = _csv_text(header, report["rows"])
    files = []
    if cfg["out"]:
        _atomic_write(cfg["out"], text)
        files.append(cfg["out"])
    stdout = text if not cfg["out"] else (
        f"checked {len(report['rows'])} coefficients of {name}: "
        f"{'all bounded' if report['ok'] else 'VIOLATIONS'}\n"
    )
    if cfg["assert_mode"] and not report["ok"]:
        worst = report["violations"][0]
        raise CheckFailure(f"coefficient bound violated at n={worst['n']}")
    return stdout, files


def run_renewal(cfg: dict) -> tuple[str, list[str]]:
    law = parse_renewal_law(cfg["law"])
    n = int(cfg["n"])
    en, en2 = renewal_moment_profile(law, n)
    check = deviation_bound_check(law, n, decay=float(cfg["decay"]))
    envelope = check["fitted_c"] * np.arange(1, n + 1, dtype=np.float64) ** (
        1.0 - float(cfg["decay"])
    )
    header = ["n", "EN", "EN2", "bound"]
    rows = [
        {"n": m, "EN": float(en[m]), "EN2": float(en2[m]), "bound": float(envelope[m - 1])}
        for m in range(1, n + 1)
    ]
    text = _csv_text(header, rows)
    files = []
    if cfg["out"]:
        _atomic_write(cfg["out"], text)
        files.append(cfg["out"])
    stdout = text if not cfg["out"] else f"wrote {len(rows)} rows to {cfg['out']}\n"
    if cfg["assert_mode"] and not check["ok"]:
        raise CheckFailure(f"deviation bound failed at n={check['worst_n']}")
    return stdout, files


def run_kappa(cfg: dict) -> tuple[str, list[str]]:
    result = kappa_quadrature(float(cfg["tol"]))
    fixture = load_kappa_fixture()
    payload = {
        "value": result.value,
        "error_estimate": result.error_estimate,
        "evaluations": result.evaluations,
        "fixture_value": fixture["value"],
        "fixture_tolerance": fixture["tolerance"],
        "within_fixture": abs(result.value - fixture["value"]) <= fixture["tolerance"],
    }
    text = _json_text(payload)
    files = []
    if cfg["out"]:
        _atomic_write(cfg["out"], text)
        files.append(cfg["out"])
    if cfg["assert_mode"] and not payload["within_fixture"]:
        raise CheckFailure("corner constant drifted outside the frozen fixture tolerance")
    return text, files


def run_identities(cfg: dict) -> tuple[str, list[str]]:
    rows = identity_suite(float(cfg["tol"]))
    header = ["name", "params", "value", "target", "rel_error", "ok"]
    text = _csv_text(header, rows)
    lines = [
        f"{'PASS' if r['ok'] else 'FAIL'}  {r['name']:<28} {r['params']:<22} "
        f"rel_err={r['rel_error']:.3e}"
        for r in rows
    ]
    stdout = "\n".join(lines) + "\n"
    files = []
    if cfg["out"]:
        _atomic_write(cfg["out"], text)
        files.append(cfg["out"])
    if cfg["assert_mode"] and not all(r["ok"] for r in rows):
        raise CheckFailure("an integral identity failed its tolerance")
    return stdout, files


def run_rwrs_clt(cfg: dict) -> tuple[str, list[str]]:
    law = parse_law(cfg["law"])
    report = quenched_clt_test(
        law,
        int(cfg["n"]),
        int(cfg["sceneries"]),
        int(cfg["walk_seed"]),
        int(cfg["scenery_seed"]),
        kind=cfg["scenery"],
        return_samples=bool(cfg["samples_out"]),
    )
    samples = report.pop("samples", None)
    text = _json_text(report)
    files = []
    if cfg["out"]:
        _atomic_write(cfg["out"], text)
        files.append(cfg["out"])
    if cfg["samples_out"]:
        rows = [{"replicate": i, "value": float(v)} for i, v in enumerate(samples)]
        _atomic_write(cfg["samples_out"], _csv_text(["replicate", "value"], rows))
        files.append(cfg["samples_out"])
    return text, files


RUNNERS = {
    "laws-inspect": run_laws_inspect,
    "walk-simulate": run_walk_simulate,
    "variance-exact": run_variance_exact,
    "variance-mc": run_variance_mc,
    "expectation-trend": run_expectation_trend,
    "contour-extract": run_contour_extract,
    "darboux-verify": run_darboux_verify,
    "renewal": run_renewal,
    "kappa": run_kappa,
    "identities": run_identities,
    "rwrs-clt": run_rwrs_clt,
}


def run_reproduce(manifest_path: str) -> tuple[str, list[str]]:
    try:
        with open(manifest_path) as fh:
            manifest = json.load(fh)
    except OSError as e:
        raise LawError(f"cannot read manifest {manifest_path}: {e}") from e
    except json.JSONDecodeError as e:
        raise LawError(f"manifest {manifest_path} is not valid JSON (line {e.lineno})") from e
    cfg = dict(manifest["config"])
    sub = cfg.get("subcommand")
    if sub not in RUNNERS:
        raise LawError(f"manifest names unknown subcommand {sub!r}")
    recorded = {entry["file"]: entry["sha256"] for entry in manifest["outputs"]}
    diffs = []
    with tempfile.TemporaryDirectory() as tmp:
        fresh = dict(cfg)
        for key in ("out", "samples_out"):
            if fresh.get(key):
                fresh[key] = os.path.join(tmp, os.path.basename(fresh[key]))
        _, files = RUNNERS[sub](fresh)
        produced = {os.path.basename(f): f for f in files}
        if set(produced) != set(recorded):
            diffs.append(
                f"output sets differ: recorded {sorted(recorded)}, fresh {sorted(produced)}"
            )
        for name in sorted(set(produced) & set(recorded)):
            if sub == "kappa":
                with open(produced[name]) as fh:
                    fresh_payload = json.load(fh)
                old_path = os.path.join(os.path.dirname(manifest_path), name)
                with open(old_path) as fh:
                    old_payload = json.load(fh)
                gap = abs(fresh_payload["value"] - old_payload["value"])
                allow = old_payload["error_estimate"] + fresh_payload["error_estimate"]
                if gap > allow + 1e-15:
                    diffs.append(f"{name}: value drift {gap:.3e} exceeds tolerance {allow:.3e}")
            elif _sha256(produced[name]) != recorded[name]:
                diffs.append(f"{name}: checksum mismatch")
    if diffs:
        raise CheckFailure("reproduce failed: " + "; ".join(diffs))
    return f"reproduced {len(recorded)} output(s) from {manifest_path}\n", []


# ---------------------------------------------------------------------------
# argument wiring
# ---------------------------------------------------------------------------


def _add_common(parser, with_assert=False):
    parser.add_argument("--config", help="JSON config file; explicit flags win")
    parser.add_argument("--out", help="output file (relative paths land in $%s)" % OUT_DIR_ENV)
    if with_assert:
        parser.add_argument(
            "--assert",
            dest="assert_mode",
            action="store_true",
            default=None,
            help="exit 4 when the built-in consistency check fails",
        )


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="silt",
        description="lattice walk self-intersection and scenery-sum experiments",
    )
    p.add_argument("--version", action="version", version=f"silt {__version__}")
    groups = p.add_subparsers(dest="group", required=True)

    laws = groups.add_parser("laws", help="step-law utilities").add_subparsers(
        dest="action", required=True
    )
    q = laws.add_parser("inspect", help="describe a step law")
    q.add_argument("--law")
    _add_common(q)

    walk = groups.add_parser("walk", help="path simulation").add_subparsers(
        dest="action", required=True
    )
    q = walk.add_parser("simulate", help="simulate one path, emit sites and V_m")
    q.add_argument("--law")
    q.add_argument("--n", type=int)
    q.add_argument("--seed", type=int)
    _add_common(q)

    var = groups.add_parser("variance", help="variance of V_n").add_subparsers(
        dest="action", required=True
    )
    q = var.add_parser("exact", help="exact decomposition per n")
    q.add_argument("--law")
    q.add_argument("--n-max", dest="n_max", type=int)
    q.add_argument("--box", type=int)
    q.add_argument("--eps-mass", dest="eps_mass", type=float)
    _add_common(q, with_assert=True)
    q = var.add_parser("mc", help="Monte Carlo var(V_n)/n^2 table")
    q.add_argument("--law")
    q.add_argument("--n", help="comma-separated horizons")
    q.add_argument("--reps", type=int)
    q.add_argument("--seed", type=int)
    q.add_argument("--workers", type=int)
    _add_common(q)

    exp = groups.add_parser("expectation", help="exact E V_n growth").add_subparsers(
        dest="action", required=True
    )
    q = exp.add_parser("trend", help="E V_n/(n log n) table, quadrature route")
    q.add_argument("--law")
    q.add_argument("--n", help="comma-separated horizons")
    _add_common(q)

    cont = groups.add_parser("contour", help="coefficient extraction").add_subparsers(
        dest="action", required=True
    )
    q = cont.add_parser("extract", help="extract one Taylor coefficient")
    q.add_argument("--series")
    q.add_argument("--n", type=int)
    q.add_argument("--points", type=int, help="fixed grid size (default: adapt to --tol)")
    q.add_argument("--tol", type=float)
    _add_common(q)

    darb = groups.add_parser("darboux", help="coefficient bound checks").add_subparsers(
        dest="action", required=True
    )
    q = darb.add_parser("verify", help="bound vs extracted coefficients")
    q.add_argument("--series")
    q.add_argument("--n-max", dest="n_max", type=int)
    _add_common(q, with_assert=True)

    q = groups.add_parser("renewal", help="renewal counts: recursion, bound")
    q.add_argument("--law")
    q.add_argument("--n", type=int)
    q.add_argument("--decay", type=float)
    _add_common(q, with_assert=True)

    q = groups.add_parser("kappa", help="planar corner constant")
    q.add_argument("--tol", type=float)
    _add_common(q, with_assert=True)

    q = groups.add_parser("identities", help="closed-form integral identities")
    q.add_argument("--check", choices=["all"], default="all")
    q.add_argument("--tol", type=float)
    _add_common(q, with_assert=True)

    rwrs = groups.add_parser("rwrs", help="random scenery diagnostics").add_subparsers(
        dest="action", required=True
    )
    q = rwrs.add_parser("clt", help="quenched normality of the scenery sum")
    q.add_argument("--law")
    q.add_argument("--n", type=int)
    q.add_argument("--sceneries", type=int)
    q.add_argument("--scenery", choices=["rademacher", "gaussian"])
    q.add_argument("--walk-seed", dest="walk_seed", type=int)
    q.add_argument("--scenery-seed", dest="scenery_seed", type=int)
    q.add_argument("--samples-out", dest="samples_out", help="also write raw samples CSV")
    _add_common(q)

    q = groups.add_parser("reproduce", help="re-run a manifest and verify checksums")
    q.add_argument("--manifest", required=True)

    return p


_DEFAULTS = {
    "laws-inspect": {"law": "zipf1d", "out": None},
    "walk-simulate": {"law": "zipf1d", "n": 1000, "seed": 1, "out": None},
    "variance-exact": {
        "law": "lazy2d",
        "n_max": 8,
        "box": None,
        "eps_mass": 1e-12,
        "out": None,
        "assert_mode": False,
    },
    "variance-mc": {
        "law": "zipf1d",
        "n": "1024,4096,16384",
        "reps": 2000,
        "seed": 1,
        "workers": 1,
        "out": None,
    },
    "expectation-trend": {"law": "zipf1d", "n": "1000,31623,1000000", "out": None},
    "contour-extract": {
        "series": "cubic_pole",
        "n": 5,
        "points": None,
        "tol": 1e-9,
        "out": None,
    },
    "darboux-verify": {
        "series": "cubic_pole",
        "n_max": 2000,
        "out": None,
        "assert_mode": False,
    },
    "renewal": {
        "law": "geometric:0.5",
        "n": 1000,
        "decay": 1.0,
        "out": None,
        "assert_mode": False,
    },
    "kappa": {"tol": 1e-8, "out": None, "assert_mode": False},
    "identities": {"tol": 1e-6, "out": None, "assert_mode": False},
    "rwrs-clt": {
        "law": "zipf1d",
        "n": 10000,
        "sceneries": 2000,
        "scenery": "rademacher",
        "walk_seed": 1,
        "scenery_seed": 2,
        "samples_out": None,
        "out": None,
    },
}


def _resolve_config(sub: str, args: argparse.Namespace) -> dict:
    file_cfg = {}
    if getattr(args, "config", None):
        try:
            with open(args.config) as fh:
                file_cfg = json.load(fh)
        except OSError as e:
            raise LawError(f"cannot read config {args.config}: {e}") from e
        except json.JSONDecodeError as e:
            raise LawError(f"config {args.config} is not valid JSON (line {e.lineno})") from e
        if not isinstance(file_cfg, dict):
            raise LawError(f"config {args.config} must hold a JSON object")
    cfg = {"subcommand": sub}
    for key, default in _DEFAULTS[sub].items():
        flag_value = getattr(args, key, None)
        if flag_value is not None:
            cfg[key] = flag_value
        elif key in file_cfg:
            cfg[key] = file_cfg[key]
        else:
            cfg[key] = default
    for key in ("out", "samples_out"):
        if key in cfg:
            cfg[key] = _resolve_out(cfg[key])
    return cfg


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    group = args.group
    sub = group if not hasattr(args, "action") else f"{group}-{args.action}"
    started = time.time()
    try:
        if group == "reproduce":
            stdout, files = run_reproduce(args.manifest)
            cfg = None
        else:
            cfg = _resolve_config(sub, args)
            stdout, files = RUNNERS[sub](cfg)
        if files:
            manifest = _write_manifest(cfg, files, started)
            stdout += f"manifest: {manifest}\n"
        sys.stdout.write(stdout)
        return 0
    except CheckFailure as e:
        sys.stderr.write(f"check failed: {e}\n")
        return 4
    except BudgetError as e:
        sys.stderr.write(f"numerical budget exceeded: {e}\n")
        return 3
    except (LawError, ValueError, OSError) as e:
        sys.stderr.write(f"configuration error: {e}\n")
        return 2


if __name__ == "__main__":
    sys.exit(main())
