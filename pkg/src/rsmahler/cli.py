"""Command-line front end: ``rsmahler gen|norm|verify|dist|sweep``.

Exit codes: 0 success, 1 failed check or non-convergence, 2 usage error.
Results are cached under a content hash of the full configuration; the
cache directory defaults to ``~/.cache/rsmahler`` and can be moved with
``RSMAHLER_CACHE_DIR``.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys
import time
from pathlib import Path
from typing import Optional

from . import __version__
from .distribution import montgomery_statistic, saffari_statistic
from .experiments import (
    fekete_experiments, littlewood_average, primes_between, rows_to_csv, rows_to_json,
    sweep_rs_mahler, sweep_rs_mq,
)
from .norms import mahler_extrapolate, mahler_from_zeros, mahler_quadrature, mq_norm, sup_norm
from .poly import from_text, fekete, from_signs, rudin_shapiro, littlewood_sample, to_signs, to_text
from .svg import histogram_svg, line_svg
from .verify import CHECK_NAMES, check_parallelogram_exact, rollup_csv, run_all, run_check

CACHE_ENV = "RSMAHLER_CACHE_DIR"


class UsageError(ValueError):
    pass


# ---------------------------------------------------------------------------
# argument helpers

def _nonneg_int(s: str) -> int:
    try:
        v = int(s)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {s!r}") from None
    if v < 0:
        raise argparse.ArgumentTypeError(f"expected a nonnegative integer, got {v}")
    return v


def _int_range(s: str) -> list[int]:
    """``"6..14"`` (inclusive) or a single integer."""
    try:
        if ".." in s:
            a, b = s.split("..", 1)
            lo, hi = int(a), int(b)
        else:
            lo = hi = int(s)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected N or A..B, got {s!r}") from None
    if lo < 0 or hi < lo:
        raise argparse.ArgumentTypeError(f"bad range {s!r}")
    return list(range(lo, hi + 1))


def _float_list(s: str) -> list[float]:
    try:
        out = [float(x) for x in s.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {s!r}") from None
    if not out:
        raise argparse.ArgumentTypeError("empty list")
    return out


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", help="output file (default: stdout)")
    common.add_argument("--format", choices=("csv", "json"), help="output format")
    common.add_argument("--cache-dir", help=f"cache directory (env {CACHE_ENV})")
    common.add_argument("--no-cache", action="store_true", help="always recompute")
    common.add_argument("--seed", type=int, default=0, help="random seed")
    common.add_argument("--threads", type=int, default=1, help="recorded thread count")
    common.add_argument("--timing", action="store_true",
                        help="fill wall-time columns (makes output run-dependent)")

    ap = argparse.ArgumentParser(prog="rsmahler", description=__doc__.splitlines()[0])
    ap.add_argument("--version", action="version", version=f"rsmahler {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen", help="write polynomials as sign strings")
    gs = g.add_subparsers(dest="family", required=True)
    x = gs.add_parser("rs", parents=[common], help="Rudin-Shapiro pair P_k, Q_k")
    x.add_argument("--k", type=_nonneg_int, required=True)
    x.add_argument("--symbolic", action="store_true")
    x = gs.add_parser("fekete", parents=[common], help="Fekete polynomial f_p")
    x.add_argument("--p", type=_nonneg_int, required=True)
    x.add_argument("--symbolic", action="store_true")
    x = gs.add_parser("lit", parents=[common], help="random Littlewood polynomials")
    x.add_argument("--n", type=_nonneg_int, required=True, help="degree")
    x.add_argument("--count", type=_nonneg_int, default=1)

    x = sub.add_parser("norm", parents=[common], help="norms and Mahler measure")
    src = x.add_mutually_exclusive_group(required=True)
    src.add_argument("--rs-k", type=_nonneg_int)
    src.add_argument("--lit", help="sign string such as +-+")
    src.add_argument("--fekete-p", type=_nonneg_int)
    src.add_argument("--poly", help="any text serialization")
    x.add_argument("--which", choices=("P", "Q"), default="P")
    x.add_argument("--kind", choices=("m2", "mq", "sup", "mahler"), required=True)
    x.add_argument("--method", choices=("quad", "zeros", "extrap"), default="quad")
    x.add_argument("--q", type=float)
    x.add_argument("--tol", type=float)

    x = sub.add_parser("verify", parents=[common], help="identity and inequality checks")
    x.add_argument("--k", type=_nonneg_int)
    x.add_argument("--check", default="all")
    x.add_argument("--N", type=_nonneg_int)
    x.add_argument("--input", help="file with P and Q (one per line), '-' for stdin")

    x = sub.add_parser("dist", parents=[common], help="value-distribution statistics")
    x.add_argument("kind", choices=("saffari", "montgomery"))
    x.add_argument("--k", type=_nonneg_int, required=True)
    x.add_argument("--N", type=_nonneg_int)
    x.add_argument("--bins", type=_nonneg_int, help="histogram bins / cells per axis")
    x.add_argument("--svg", help="write a histogram SVG here")

    x = sub.add_parser("sweep", parents=[common], help="convergence sweeps")
    x.add_argument("name", choices=("rs-mahler", "rs-mq", "lit-avg", "fekete"))
    x.add_argument("--k", type=_int_range)
    x.add_argument("--n", type=_int_range)
    x.add_argument("--p", type=_int_range)
    x.add_argument("--q", type=_float_list)
    x.add_argument("--method", choices=("quad", "zeros"), default="quad")
    x.add_argument("--mode", choices=("exhaustive", "montecarlo"), default="exhaustive")
    x.add_argument("--count", type=_nonneg_int, default=4096)
    x.add_argument("--tol", type=float)
    x.add_argument("--svg", help="write a gap-vs-parameter SVG here")
    return ap


# ---------------------------------------------------------------------------
# command bodies; each returns (primary text, exit code, {side file: text})

def _cmd_gen(a, stdin_text):
    if a.family == "rs":
        pair = rudin_shapiro(a.k)
        polys = [pair.p, pair.q]
    elif a.family == "fekete":
        polys = [fekete(a.p)]
    else:
        if a.count < 1:
            raise UsageError("--count must be at least 1")
        polys = list(littlewood_sample(a.n, a.count, a.seed))
    sym = getattr(a, "symbolic", False)
    lines = [to_text(f, symbolic=True) if sym else to_signs(f) for f in polys]
    return "\n".join(lines) + "\n", 0, {}


def _norm_input(a):
    if a.rs_k is not None:
        pair = rudin_shapiro(a.rs_k)
        return pair.p if a.which == "P" else pair.q
    if a.fekete_p is not None:
        return fekete(a.fekete_p)
    if a.lit is not None:
        return from_signs(a.lit)
    return from_text(a.poly)


def _cmd_norm(a, stdin_text):
    f = _norm_input(a)
    tol = {} if a.tol is None else {"tol": a.tol}
    if a.kind == "m2":
        est = mq_norm(f, 2.0, **tol)
    elif a.kind == "mq":
        if a.q is None or a.q <= 0:
            raise UsageError("--kind mq needs --q > 0")
        est = mq_norm(f, a.q, **tol)
    elif a.kind == "sup":
        est = sup_norm(f, **tol)
    elif a.method == "quad":
        est = mahler_quadrature(f, **tol)
    elif a.method == "zeros":
        est = mahler_from_zeros(f)
    else:
        est = mahler_extrapolate(f, **tol)
    return json.dumps(est.to_dict(), sort_keys=True, indent=1) + "\n", 0 if est.converged else 1, {}


def _check_name(s: str) -> str:
    s = s.strip().lower().replace("-", "_")
    if s.startswith("check_"):
        s = s[len("check_"):]
    if s == "parallelogram":
        s = "parallelogram_exact"
    if s != "all" and s not in CHECK_NAMES:
        raise UsageError(f"unknown check {s!r}; choose all or one of {', '.join(CHECK_NAMES)}")
    return s


def _cmd_verify(a, stdin_text):
    name = _check_name(a.check)
    fmt = a.format or "csv"
    if a.input is not None:
        if name != "parallelogram_exact":
            raise UsageError("--input supports only the parallelogram check")
        lines = [ln for ln in stdin_text.splitlines() if ln.strip()]
        if len(lines) != 2:
            raise UsageError("--input needs exactly two polynomials (P then Q)")
        p, q = (from_text(ln) for ln in lines)
        n = len(p.coeffs)
        k = n.bit_length() - 1
        if n != 1 << k:
            raise UsageError(f"input length {n} is not a power of two")
        reports = [check_parallelogram_exact(k, p=p, q=q)]
        names = ["parallelogram_exact"]
    else:
        if a.k is None:
            raise UsageError("verify needs --k or --input")
        k = a.k
        if name == "all":
            reports = run_all(k, a.N)
            names = list(CHECK_NAMES)
        else:
            reports = [run_check(name, k, a.N)]
            names = [name]
    if fmt == "json":
        text = json.dumps([None if r is None else r.to_dict() for r in reports],
                          sort_keys=True, indent=1) + "\n"
    else:
        text = rollup_csv(k, reports, names)
    ok = all(r is None or r.passed for r in reports)
    return text, 0 if ok else 1, {}


def _cmd_dist(a, stdin_text):
    N = a.N if a.N is not None else 32 << a.k
    if a.kind == "saffari":
        rep = saffari_statistic(a.k, N, a.bins or 20)
        edges = rep.bins["edges"]
        xlabel = "|P|^2 / 2n"
    else:
        rep = montgomery_statistic(a.k, N, a.bins or 16)
        edges = list(range(len(rep.bins["masses"].ravel()) + 1))
        xlabel = "cell index (row-major in x)"
    text = rep.to_csv() if a.format == "csv" else rep.to_json() + "\n"
    side = {}
    if a.svg:
        title = f"{a.kind} k={a.k} N={rep.grid_size} statistic={rep.statistic:.6g}"
        side[a.svg] = histogram_svg(edges, rep.bins["masses"].ravel().tolist(),
                                    rep.bins["limit_masses"].ravel().tolist(), title, xlabel)
    return text, 0, side


def _cmd_sweep(a, stdin_text):
    tol = {} if a.tol is None else {"tol": a.tol}
    if a.name == "rs-mahler":
        ks = a.k or list(range(6, 15))
        rows = sweep_rs_mahler(ks[0], ks[-1], a.method, **tol)
    elif a.name == "rs-mq":
        ks = a.k or list(range(8, 17, 4))
        rows = sweep_rs_mq(ks[0], ks[-1], a.q or [1.0, 3.0, 6.0], **tol)
    elif a.name == "lit-avg":
        if not a.n:
            raise UsageError("lit-avg needs --n")
        qs = a.q or [0.0]
        rows = [littlewood_average(n, q, a.mode, a.count, a.seed) for n in a.n for q in qs]
    else:
        ps = a.p or [101, 997]
        rows = fekete_experiments(primes_between(ps[0], ps[-1]), **tol)
    if a.format == "json":
        text = rows_to_json(rows, timing=a.timing) + "\n"
    else:
        text = rows_to_csv(rows, timing=a.timing)
    side = {}
    if a.svg:
        side[a.svg] = line_svg([r.parameter for r in rows], [r.gap for r in rows],
                               f"sweep {a.name}", "parameter", "value - reference")
    return text, 0, side


COMMANDS = {"gen": _cmd_gen, "norm": _cmd_norm, "verify": _cmd_verify,
            "dist": _cmd_dist, "sweep": _cmd_sweep}


# ---------------------------------------------------------------------------
# caching, manifests, output

def _config(a, stdin_text) -> dict:
    skip = {"out", "cache_dir", "no_cache", "svg"}
    cfg = {k: v for k, v in sorted(vars(a).items()) if k not in skip}
    if stdin_text is not None:
        cfg["input_sha256"] = hashlib.sha256(stdin_text.encode()).hexdigest()
    cfg["version"] = __version__
    return cfg


def _sha(text: str) -> str:
    return hashlib.sha256(text.encode()).hexdigest()


def _cache_dir(a) -> Path:
    if a.cache_dir:
        return Path(a.cache_dir)
    env = os.environ.get(CACHE_ENV)
    return Path(env) if env else Path.home() / ".cache" / "rsmahler"


def _cache_load(path: Path, key: str) -> Optional[dict]:
    data_file, meta_file = path / f"{key}.json", path / f"{key}.manifest.json"
    try:
        data = data_file.read_text(encoding="utf-8")
        meta = json.loads(meta_file.read_text(encoding="utf-8"))
    except (OSError, ValueError):
        return None
    if meta.get("payload_sha256") != _sha(data):
        return None  # corrupted entry: recompute
    try:
        return json.loads(data)
    except ValueError:
        return None


def _cache_store(path: Path, key: str, payload: dict) -> None:
    try:
        path.mkdir(parents=True, exist_ok=True)
        data = json.dumps(payload, sort_keys=True)
        (path / f"{key}.json").write_text(data, encoding="utf-8", newline="\n")
        (path / f"{key}.manifest.json").write_text(
            json.dumps({"key": key, "payload_sha256": _sha(data)}), encoding="utf-8")
    except OSError as exc:
        print(f"warning: cache write failed: {exc}", file=sys.stderr)


def _write(path: str, text: str) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


def main(argv: Optional[list[str]] = None) -> int:
    parser = build_parser()
    try:
        a = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    stdin_text = None
    if getattr(a, "input", None) is not None:
        try:
            stdin_text = sys.stdin.read() if a.input == "-" else Path(a.input).read_text(encoding="utf-8")
        except OSError as exc:
            print(f"error: {exc}", file=sys.stderr)
            return 2
    cfg = _config(a, stdin_text)
    key = _sha(json.dumps(cfg, sort_keys=True, default=str))
    t0 = time.perf_counter()
    cache = None if a.no_cache else _cache_dir(a)
    payload = _cache_load(cache, key) if cache is not None else None
    hit = payload is not None
    if hit:
        print(f"cache hit: {key[:16]}", file=sys.stderr)
    else:
        try:
            text, code, side = COMMANDS[a.command](a, stdin_text)
        except (UsageError, ValueError) as exc:
            print(f"error: {exc}", file=sys.stderr)
            return 2
        except (ArithmeticError, RuntimeError) as exc:
            print(f"error: {exc}", file=sys.stderr)
            return 1
        payload = {"output": text, "exit_code": code,
                   "side": {os.path.basename(k): v for k, v in side.items()}}
        if cache is not None:
            _cache_store(cache, key, payload)
    text, code = payload["output"], int(payload["exit_code"])
    svg = getattr(a, "svg", None)
    if svg:
        _write(svg, payload["side"].get(os.path.basename(svg), ""))
    if a.out:
        _write(a.out, text)
        manifest = {
            "config": cfg,
            "artifact_version": __version__,
            "wall_time_s": round(time.perf_counter() - t0, 6),
            "cache_hit": hit,
            "cache_key": key,
            "output_sha256": _sha(text),
            "exit_code": code,
        }
        _write(a.out + ".manifest.json", json.dumps(manifest, sort_keys=True, indent=1) + "\n")
    else:
        sys.stdout.write(text)
        sys.stdout.flush()
    return code


if __name__ == "__main__":
    sys.exit(main())
