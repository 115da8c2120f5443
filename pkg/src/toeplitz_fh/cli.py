"""Command-line front end.  Every command writes one CSV (header row, LF endings).

Column schemas:
  coeffs       n,real,imag
  eig          alpha,N,lambda_min,iterations,residual
  kernel-norm  alpha,M,norm,inverse_norm,extrapolated_inverse_norm,trace_estimate
  verify       theorem,<parameters>,<row keys>,measured,predicted,residual,verdict
  sweep        as verify, one principal study per alpha

Exit status: 0 success or pass (inconclusive included, noted on stderr),
1 fail verdict, 2 usage error, 3 numerical error.
"""

from __future__ import annotations

import argparse
import csv
import io
import shlex
import sys
from dataclasses import dataclass

from . import experiments as ex
from .core import LevinsonBreakdown, build_toeplitz
from .kernels import (
    KernelDomainError,
    extrapolated_inverse_norm,
    iterated_trace_norm,
    nystrom_G,
    operator_norm_nystrom,
)
from .spectra import DEFAULT_SEED, ConvergenceError, lambda_min_toeplitz
from .symbols import PRESETS, SymbolError, SymbolSpec, fourier_of_inverse_symbol, fourier_of_symbol

__all__ = ["RunConfig", "UsageError", "build_parser", "parse_config", "run", "main"]

COMMANDS = ("coeffs", "eig", "kernel-norm", "verify", "sweep")
VERIFY_THEOREMS = tuple(t.replace("_", "-") for t in ex.THEOREMS)

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_NUMERIC = 0, 1, 2, 3


class UsageError(ValueError):
    pass


def _floats(text: str) -> tuple:
    try:
        return tuple(float(t) for t in text.split(",") if t.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}")


def _ints(text: str) -> tuple:
    try:
        return tuple(int(t) for t in text.split(",") if t.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")


def parse_c1(text: str) -> tuple:
    """A preset name or comma-separated coefficients c1^(-d..d) (Python complex syntax allowed)."""
    if text in PRESETS:
        return tuple(PRESETS[text])
    try:
        vals = [complex(t.strip().replace(" ", "")) for t in text.split(",") if t.strip()]
    except ValueError:
        raise UsageError(f"c1 must be one of {sorted(PRESETS)} or a coefficient list, got {text!r}")
    return tuple(v.real if v.imag == 0 else v for v in vals)


@dataclass(frozen=True)
class RunConfig:
    command: str
    theorem: str | None = None
    alpha: tuple = ()
    c1: str = "one"
    c2: str | None = None
    N: tuple = ()
    M: int | None = None
    half_width: int | None = None
    seed: int = DEFAULT_SEED
    output: str | None = None
    threshold: float | None = None
    delta: float | None = None
    interior: float | None = None
    s_max: int | None = None
    inverse: bool = False

    def to_argv(self) -> list:
        argv = [self.command]
        if self.theorem:
            argv.append(self.theorem)
        if self.alpha:
            argv += ["--alpha", ",".join(repr(a) for a in self.alpha)]
        argv += ["--c1", self.c1]
        if self.c2 is not None:
            argv += ["--c2", self.c2]
        if self.N:
            argv += ["--N", ",".join(str(n) for n in self.N)]
        for flag, val in (("--M", self.M), ("--half-width", self.half_width), ("--threshold", self.threshold),
                          ("--delta", self.delta), ("--interior", self.interior), ("--s-max", self.s_max)):
            if val is not None:
                argv += [flag, repr(val)]
        argv += ["--seed", str(self.seed)]
        if self.inverse:
            argv.append("--inverse")
        if self.output is not None:
            argv += ["-o", self.output]
        return argv

    def to_text(self) -> str:
        return shlex.join(self.to_argv())

    @classmethod
    def from_text(cls, text: str) -> "RunConfig":
        return parse_config(shlex.split(text))


def _add_common(p: argparse.ArgumentParser):
    p.add_argument("--alpha", type=_floats, default=(), help="exponent(s), comma-separated")
    p.add_argument("--c1", default="one", help="regular factor: 'one', 'shifted-cos' or coefficients c1^(-d..d)")
    p.add_argument("--seed", type=lambda s: int(s, 0), default=DEFAULT_SEED)
    p.add_argument("-o", "--output", default=None, help="CSV path (default: stdout)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="toeplitz-fh", description=__doc__,
                                     formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("coeffs", help="Fourier coefficients of the symbol (or of its inverse)")
    _add_common(p)
    p.add_argument("--half-width", type=int, required=True)
    p.add_argument("--inverse", action="store_true", help="tabulate the inverse symbol instead")

    p = sub.add_parser("eig", help="smallest eigenvalue of T_N for each N")
    _add_common(p)
    p.add_argument("--N", type=_ints, required=True)

    p = sub.add_parser("kernel-norm", help="Nystrom norm of the G_alpha operator")
    _add_common(p)
    p.add_argument("--M", type=int, default=1000)
    p.add_argument("--s-max", type=int, default=None, help="also report the iterated-trace estimate t_s")

    p = sub.add_parser("verify", help="run one verification study")
    p.add_argument("theorem", choices=VERIFY_THEOREMS)
    _add_common(p)
    p.add_argument("--c2", default=None, help="regular factor of the second symbol (prod)")
    p.add_argument("--N", type=_ints, default=())
    p.add_argument("--M", type=int, default=None)
    p.add_argument("--threshold", type=float, default=None)
    p.add_argument("--delta", type=float, default=None)
    p.add_argument("--interior", type=float, default=None)

    p = sub.add_parser("sweep", help="principal study for every alpha in the list")
    _add_common(p)
    p.add_argument("--N", type=_ints, required=True)
    p.add_argument("--M", type=int, default=None)
    p.add_argument("--threshold", type=float, default=None)
    return parser


def parse_config(argv) -> RunConfig:
    """Parse and validate; raises UsageError on any invalid combination."""
    parser = build_parser()
    err = io.StringIO()
    try:
        old, sys.stderr = sys.stderr, err
        ns = parser.parse_args(list(argv))
    except SystemExit as exc:
        if exc.code == 0:
            sys.stderr = old
            sys.stdout.flush()
            raise
        raise UsageError(err.getvalue().strip().splitlines()[-1] if err.getvalue().strip() else "bad arguments") from exc
    finally:
        sys.stderr = old
    d = vars(ns)
    cfg = RunConfig(
        command=d["command"],
        theorem=d.get("theorem"),
        alpha=tuple(d.get("alpha") or ()),
        c1=d["c1"],
        c2=d.get("c2"),
        N=tuple(d.get("N") or ()),
        M=d.get("M"),
        half_width=d.get("half_width"),
        seed=d["seed"],
        output=d["output"],
        threshold=d.get("threshold"),
        delta=d.get("delta"),
        interior=d.get("interior"),
        s_max=d.get("s_max"),
        inverse=bool(d.get("inverse", False)),
    )
    validate(cfg)
    return cfg


def _need(cond: bool, msg: str):
    if not cond:
        raise UsageError(msg)


def validate(cfg: RunConfig):
    _need(cfg.command in COMMANDS, f"unknown command {cfg.command!r}")
    parse_c1(cfg.c1)
    if cfg.c2 is not None:
        parse_c1(cfg.c2)
    _need(all(n > 0 for n in cfg.N), "N values must be positive")
    if cfg.N and cfg.command in ("verify", "sweep", "eig"):
        _need(list(cfg.N) == sorted(set(cfg.N)), "N list must be strictly ascending")
    single_alpha = cfg.command in ("coeffs", "eig", "kernel-norm") or cfg.theorem in (
        "principal", "inverse1", "inverse2", "noyau", "predictor", "rappel", "morphos")
    if cfg.theorem == "widom":
        _need(bool(cfg.N), "widom needs --N sizes")
        return
    _need(bool(cfg.alpha), "--alpha is required")
    if single_alpha:
        _need(len(cfg.alpha) == 1, f"{cfg.theorem or cfg.command} takes exactly one alpha")
    for a in cfg.alpha:
        try:
            SymbolSpec(a, parse_c1(cfg.c1))
        except SymbolError as exc:
            raise UsageError(str(exc)) from exc
    if cfg.command == "kernel-norm" or cfg.theorem in ("bounds", "prod", "inverse1", "noyau", "morphos"):
        _need(all(0 < a <= 0.5 for a in cfg.alpha), "kernel computations need 0 < alpha <= 1/2")
    if cfg.command == "coeffs":
        _need(cfg.half_width is not None and cfg.half_width >= 0, "--half-width must be >= 0")
    if cfg.command == "kernel-norm":
        _need(cfg.M is not None and cfg.M >= 16, "--M must be >= 16")
        _need(cfg.s_max is None or cfg.s_max >= 2, "--s-max must be >= 2")
    if cfg.command in ("verify", "sweep") and cfg.theorem not in ("bounds", "half-lemma"):
        _need(bool(cfg.N), "--N is required")
    if cfg.theorem == "prod":
        _need(len(cfg.alpha) == 2, "prod takes --alpha a1,a2")
        _need(sum(cfg.alpha) > 0.5, "prod needs alpha1 + alpha2 > 1/2")
    if cfg.theorem == "inverse2":
        _need(len(cfg.N) == 1, "inverse2 takes a single --N")
        _need(cfg.delta is not None, "inverse2 needs --delta")
    if cfg.theorem == "half-lemma":
        _need(bool(cfg.N), "--N is required")
    if cfg.M is not None and cfg.command in ("verify", "sweep") and cfg.theorem in (None, "principal", "prod"):
        _need(cfg.M >= 500, "--M must be >= 500 for operator predictions")


def _fmt(v) -> str:
    if isinstance(v, bool):
        return str(v).lower()
    if isinstance(v, int):
        return str(v)
    if isinstance(v, float):
        return format(v, ".17g")
    return str(v)


def _write_csv(header, rows, output):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([_fmt(v) for v in r])
    text = buf.getvalue()
    if output is None:
        sys.stdout.write(text)
    else:
        with open(output, "w", newline="", encoding="utf-8") as fh:
            fh.write(text)


def _spec(alpha: float, c1: str) -> SymbolSpec:
    return SymbolSpec(alpha, parse_c1(c1))


def _report_table(reports):
    params = []
    for r in reports:
        for k in ("alpha", "alpha1", "alpha2", "delta"):
            if k in r.params and isinstance(r.params[k], (int, float)) and k not in params and k not in r.key_columns:
                params.append(k)
    keys = []
    for r in reports:
        for k in r.key_columns:
            if k not in keys:
                keys.append(k)
    header = ["theorem"] + params + keys + ["measured", "predicted", "residual", "verdict"]
    rows = []
    for r in reports:
        for row in r.rows:
            rows.append([r.theorem_id] + [r.params.get(p, "") for p in params] + [row.key.get(k, "") for k in keys]
                        + [row.measured, row.predicted, row.residual, r.verdict])
    return header, rows


def _thr(cfg, default):
    return default if cfg.threshold is None else cfg.threshold


def _verify(cfg: RunConfig):
    th = cfg.theorem.replace("-", "_")
    a = cfg.alpha
    if th == "widom":
        return ex.verify_widom(cfg.N, seed=cfg.seed)
    if th == "bounds":
        return ex.verify_bounds(a, M=cfg.M or 1000)
    if th == "half_lemma":
        return ex.verify_half_lemma(_spec(0.5, cfg.c1), a, cfg.N, max_over_median=_thr(cfg, 3.0))
    if th == "prod":
        return ex.verify_prod(_spec(a[0], cfg.c1), _spec(a[1], cfg.c2 or cfg.c1), cfg.N, M=cfg.M or 1000,
                              threshold=_thr(cfg, 0.07), seed=cfg.seed)
    spec = _spec(a[0], cfg.c1)
    if th == "principal":
        return ex.verify_principal(spec, cfg.N, M=cfg.M or 1000, threshold=_thr(cfg, 0.05), seed=cfg.seed)
    if th == "noyau":
        return ex.verify_noyau(spec, cfg.N, threshold=_thr(cfg, 0.05))
    if th == "inverse1":
        return ex.verify_inverse1(spec, cfg.N, threshold=_thr(cfg, 0.05))
    if th == "inverse2":
        return ex.verify_inverse2(spec, cfg.N[0], cfg.delta)
    if th == "predictor":
        return ex.verify_predictor(spec, cfg.N)
    if th == "rappel":
        return ex.verify_predictor(spec, cfg.N, parts=("edge",), edge_threshold=_thr(cfg, 0.10))
    if th == "morphos":
        return ex.verify_morphos(spec, cfg.N, interior=cfg.interior or 0.0, band=_thr(cfg, 1.5))
    raise UsageError(f"unknown theorem {cfg.theorem!r}")


def run(cfg: RunConfig) -> int:
    """Execute a validated config; returns the exit status."""
    if cfg.command == "coeffs":
        spec = _spec(cfg.alpha[0], cfg.c1)
        table = (fourier_of_inverse_symbol if cfg.inverse else fourier_of_symbol)(spec, cfg.half_width)
        rows = [[int(n), float(complex(table[n]).real), float(complex(table[n]).imag)] for n in table.indices]
        _write_csv(["n", "real", "imag"], rows, cfg.output)
        print(f"coeffs: ok ({len(rows)} rows)", file=sys.stderr)
        return EXIT_OK
    if cfg.command == "eig":
        spec = _spec(cfg.alpha[0], cfg.c1)
        rows = []
        for N in cfg.N:
            est = lambda_min_toeplitz(build_toeplitz(fourier_of_symbol(spec, N), N), seed=cfg.seed)
            rows.append([spec.alpha, N, est.value, est.iterations, est.residual])
        _write_csv(["alpha", "N", "lambda_min", "iterations", "residual"], rows, cfg.output)
        print(f"eig: ok ({len(rows)} orders)", file=sys.stderr)
        return EXIT_OK
    if cfg.command == "kernel-norm":
        a = cfg.alpha[0]
        K = nystrom_G(a, cfg.M)
        norm = operator_norm_nystrom(K, seed=cfg.seed)
        trace = float(iterated_trace_norm(K, cfg.s_max)[-1]) if cfg.s_max else ""
        row = [a, cfg.M, norm, 1.0 / norm, extrapolated_inverse_norm(a, cfg.M), trace]
        _write_csv(["alpha", "M", "norm", "inverse_norm", "extrapolated_inverse_norm", "trace_estimate"], [row],
                   cfg.output)
        print("kernel-norm: ok", file=sys.stderr)
        return EXIT_OK
    if cfg.command == "verify":
        reports = [_verify(cfg)]
    else:
        reports = [ex.verify_principal(_spec(a, cfg.c1), cfg.N, M=cfg.M or 1000, threshold=_thr(cfg, 0.05),
                                       seed=cfg.seed) for a in cfg.alpha]
    header, rows = _report_table(reports)
    _write_csv(header, rows, cfg.output)
    verdicts = [r.verdict for r in reports]
    numeric = any(r.criterion.startswith("numerical failure") for r in reports)
    line = "; ".join(r.summary() for r in reports)
    if "inconclusive" in verdicts and not numeric:
        line += " [inconclusive: residuals still shrinking above threshold]"
    print(line, file=sys.stderr)
    if numeric:
        return EXIT_NUMERIC
    return EXIT_FAIL if "fail" in verdicts else EXIT_OK


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else argv
    try:
        cfg = parse_config(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    try:
        return run(cfg)
    except (UsageError, SymbolError, KernelDomainError, ex.EmptyRegionError) as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ConvergenceError, LevinsonBreakdown, ArithmeticError, FloatingPointError) as exc:
        print(f"numerical error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
