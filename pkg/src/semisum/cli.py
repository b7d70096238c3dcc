"""``semisum`` command line: spectra, WKB levels, sums, TF energies and reproductions.

Output is CSV (schema line ``# semisum-csv v1``) or an aligned text table.
Exit codes: 0 success, 2 usage error, 3 precision failure, 4 reproduction
assertion failure.
"""
from __future__ import annotations

import argparse
import csv
import io
import math
import os
import sys
from dataclasses import dataclass, field
from typing import Optional, Sequence

import mpmath

from .errors import PrecisionError, SemisumError, UsageError
from .oracle import PrecisionConfig, airy_zero_sum, exact_sum, pt_lambda, spectrum
from .potentials import PotentialSpec, parse_potential
from .sums import CONVENTIONS, breakdown, integral_sum, wkb0_sum
from .tf import gea_study, tf_energy_parts, tf_total_energy
from .wkb import quantize

SCHEMA = "# semisum-csv v1"
SUBCOMMANDS = ("eigs", "wkb", "sum", "sweep", "tf", "reproduce")
TARGETS = ("airy_e10", "pt_table", "ls_trend", "gea_trend")
ORACLES = {"auto": "auto", "closed": "closed_form", "airy": "airy_zero", "grid": "grid_solver"}
# stored as text and compared as text; never round-tripped through a float
AIRY_E10_REFERENCE = "81.513600174613249757575849944135032733"
PT_TABLE_REFERENCE = {
    "exact": -15.0,
    "wkb0_sum": -14.722912,
    "e0_endpoint": -10.292184,
    "d2b": -4.180728,
    "b2_endpoint": -0.25,
    "e_tf": -14.889579,
}
DEFAULT_DIGITS = 15

EXIT_OK, EXIT_USAGE, EXIT_PRECISION, EXIT_REPRODUCE = 0, 2, 3, 4


@dataclass(frozen=True)
class RunConfig:
    subcommand: str
    potential: Optional[PotentialSpec] = None
    N: Optional[int] = None
    precision: PrecisionConfig = PrecisionConfig()
    convention: str = "endpoint"
    order: int = 2
    output: str = "-"
    format: str = "csv"
    oracle: str = "auto"
    discrete_eps2: bool = False
    target: Optional[str] = None
    values: tuple = ()
    cell_length: float = 10.0

    def __post_init__(self):
        if self.subcommand not in SUBCOMMANDS:
            raise UsageError(f"unknown subcommand {self.subcommand!r}")
        if self.N is not None and self.N < 1:
            raise UsageError("--n must be >= 1")
        if self.output != "-":
            parent = os.path.dirname(os.path.abspath(self.output))
            if not os.access(parent, os.W_OK):
                raise UsageError(f"output path {self.output!r} is not writable")


# ---------------------------------------------------------------------------
# argument parsing

class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _float_list(text):
    return tuple(float(t) for t in text.split(",") if t.strip())


def _build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--format", choices=("csv", "table"), default=None,
                        help="output format (default csv)")
    common.add_argument("--output", default=None, help="output file (default stdout)")
    common.add_argument("--config", default=None,
                        help="file of 'key = value' lines; command-line flags win")
    common.add_argument("--digits", type=int, default=None,
                        help=f"target digits (default $SEMISUM_DIGITS or {DEFAULT_DIGITS})")

    parser = _Parser(prog="semisum", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="subcommand", required=True, parser_class=_Parser)

    p = sub.add_parser("eigs", parents=[common], help="lowest eigenvalues from an oracle")
    p.add_argument("potential")
    p.add_argument("--n", type=int, default=None)
    p.add_argument("--oracle", choices=tuple(ORACLES), default=None,
                   help="auto (default), closed, airy or grid")

    p = sub.add_parser("wkb", parents=[common], help="WKB levels at order 0 or 2")
    p.add_argument("potential")
    p.add_argument("--n", type=int, default=None)
    p.add_argument("--order", type=int, choices=(0, 2), default=None, help="default 2")

    for name, helptext in (("sum", "eigenvalue-sum breakdown"),
                           ("sweep", "breakdown over a list of Poschl-Teller depths")):
        p = sub.add_parser(name, parents=[common], help=helptext)
        p.add_argument("potential", help="potential spec; for sweep, 'pt'")
        p.add_argument("--n", type=int, default=None,
                       help="levels summed (sweep default: floor(lambda))")
        p.add_argument("--convention", choices=CONVENTIONS, default=None,
                       help="endpoint (default) or midpoint")
        p.add_argument("--order", type=int, choices=(0, 2, 4), default=None, help="default 2")
        p.add_argument("--discrete-eps2", action="store_true", default=None,
                       help="sum eps2 over levels instead of integrating it")
        if name == "sweep":
            p.add_argument("--D", dest="values", type=_float_list, default=None,
                           help="comma-separated depths (default 10,100,1000)")

    p = sub.add_parser("tf", parents=[common], help="Thomas-Fermi energy, or 'tf gea'")
    p.add_argument("potential", help="potential spec, or 'gea' for the periodic study")
    p.add_argument("--n", type=int, default=None)
    p.add_argument("--eta", dest="values", type=_float_list, default=None,
                   help="amplitudes for 'tf gea' (default 0.5,0.2,0.05)")
    p.add_argument("--L", dest="cell_length", type=float, default=None,
                   help="cell length for 'tf gea' (default 10)")

    p = sub.add_parser("reproduce", parents=[common], help="rerun a benchmark and check it")
    p.add_argument("target", choices=TARGETS)
    return parser


_CONFIG_KEYS = {
    "n": int, "digits": int, "order": int, "convention": str, "format": str,
    "output": str, "oracle": str, "discrete_eps2": lambda s: s.lower() in ("1", "true", "yes"),
    "values": _float_list, "eta": _float_list, "d": _float_list, "cell_length": float,
    "l": float,
}


def read_config(path: str) -> dict:
    """Parse ``key = value`` lines; blank lines and ``#`` comments are skipped."""
    out = {}
    try:
        with open(path, encoding="utf-8") as fh:
            lines = fh.readlines()
    except OSError as exc:
        raise UsageError(f"cannot read config {path!r}: {exc}") from None
    for lineno, raw in enumerate(lines, 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        key = key.strip().lower().replace("-", "_")
        if not sep or key not in _CONFIG_KEYS:
            raise UsageError(f"{path}:{lineno}: unrecognised config line {raw.strip()!r}")
        try:
            parsed = _CONFIG_KEYS[key](value.strip())
        except ValueError:
            raise UsageError(f"{path}:{lineno}: bad value for {key}") from None
        key = {"eta": "values", "d": "values", "l": "cell_length"}.get(key, key)
        out[key] = parsed
    return out


def _env_digits() -> int:
    text = os.environ.get("SEMISUM_DIGITS")
    if text is None:
        return DEFAULT_DIGITS
    try:
        return int(text)
    except ValueError:
        raise UsageError(f"SEMISUM_DIGITS must be an integer, got {text!r}") from None


def parse_args(argv: Sequence[str]) -> RunConfig:
    """Validate ``argv`` into a :class:`RunConfig` (flags > config file > defaults)."""
    ns = _build_parser().parse_args(list(argv))
    given = {k: v for k, v in vars(ns).items() if v is not None}
    merged = read_config(ns.config) if ns.config else {}
    merged.update(given)

    def get(key, default):
        return merged.get(key, default)

    digits = get("digits", None) or _env_digits()
    if digits < 1:
        raise UsageError("--digits must be positive")
    order = get("order", 2)
    if ns.subcommand in ("sum", "sweep") and merged.get("discrete_eps2") and order == 0:
        raise UsageError("--discrete-eps2 needs --order 2 or 4")
    if ns.subcommand == "wkb" and order not in (0, 2):
        raise UsageError("wkb takes --order 0 or 2")
    oracle = get("oracle", "auto")
    if oracle not in ORACLES:
        raise UsageError(f"unknown oracle {oracle!r}")
    convention = get("convention", "endpoint")
    if convention not in CONVENTIONS:
        raise UsageError(f"unknown convention {convention!r}")
    fmt = get("format", "csv")
    if fmt not in ("csv", "table"):
        raise UsageError(f"unknown format {fmt!r}")

    potential, target, values = None, None, tuple(get("values", ()))
    text = getattr(ns, "potential", None)
    if ns.subcommand == "reproduce":
        target = ns.target
    elif ns.subcommand == "tf" and text == "gea":
        target = "gea"
        values = values or (0.5, 0.2, 0.05)
    elif ns.subcommand == "sweep":
        if text.split(":")[0] != "pt":
            raise UsageError(f"sweep runs over Poschl-Teller depths; got {text!r}")
        values = values or (10.0, 100.0, 1000.0)
    else:
        potential = parse_potential(text)
    N = get("n", None)
    if N is None and ns.subcommand in ("eigs", "wkb", "sum", "tf") and target is None:
        raise UsageError("--n is required")
    if target == "gea" and N is None:
        N = 5
    return RunConfig(ns.subcommand, potential, N, PrecisionConfig(target_digits=digits),
                     convention, order, get("output", "-"), fmt, oracle,
                     bool(get("discrete_eps2", False)), target, values,
                     get("cell_length", 10.0))


# ---------------------------------------------------------------------------
# formatting

def fmt_value(v, digits: int = DEFAULT_DIGITS) -> str:
    """Locale-free text for a cell: floats use repr, mpf values ``digits`` digits."""
    if v is None:
        return ""
    if isinstance(v, mpmath.mpf):
        return mpmath.nstr(v, digits, strip_zeros=False)
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float) or hasattr(v, "dtype"):
        return repr(float(v))
    return str(v)


@dataclass
class Report:
    header: list
    rows: list
    notes: list = field(default_factory=list)
    status: int = EXIT_OK


def render(report: Report, fmt: str, digits: int) -> str:
    cells = [[fmt_value(v, digits) for v in row] for row in report.rows]
    buf = io.StringIO()
    buf.write(SCHEMA + "\n")
    if fmt == "csv":
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(report.header)
        writer.writerows(cells)
    else:
        widths = [max([len(h)] + [len(r[i]) for r in cells]) for i, h in enumerate(report.header)]
        buf.write("  ".join(h.ljust(w) for h, w in zip(report.header, widths)).rstrip() + "\n")
        for r in cells:
            buf.write("  ".join(c.rjust(w) for c, w in zip(r, widths)).rstrip() + "\n")
    for note in report.notes:
        buf.write(f"# {note}\n")
    return buf.getvalue()


# ---------------------------------------------------------------------------
# subcommands

def _eigs(cfg: RunConfig) -> Report:
    spec_ = spectrum(cfg.potential, cfg.N, cfg.precision, ORACLES[cfg.oracle])
    rows = [(j, e, spec_.source, spec_.precision_digits) for j, e in enumerate(spec_.eigenvalues)]
    return Report(["j", "eigenvalue", "source", "digits"], rows)


def _exact_levels(spec: PotentialSpec, n: int):
    try:
        return [float(e) for e in spectrum(spec, n).eigenvalues]
    except SemisumError:
        return [None] * n


def _wkb(cfg: RunConfig) -> Report:
    exact = _exact_levels(cfg.potential, cfg.N)
    rows = []
    for j in range(cfg.N):
        s = quantize(cfg.potential, j, cfg.order)
        ex = exact[j]
        rows.append((j, s.eps0, s.eps2, ex, None if ex is None else s.total - ex))
    return Report(["j", "eps0", "eps2", "exact", "error"], rows)


_SUM_HEADER = ["N", "convention", "order", "d2a_mode", "level_function", "e0", "d2a", "d2b",
               "em_b2", "em_b4", "total", "exact", "error"]


def _sum_row(b):
    em = list(b.em_higher) + [None, None]
    return [b.N, b.convention, b.order, b.d2a_mode, b.level_function, b.e0, b.d2a, b.d2b,
            em[0], em[1], b.total, b.exact, b.error]


def _sum(cfg: RunConfig) -> Report:
    b = breakdown(cfg.potential, cfg.N, cfg.convention, cfg.order, cfg.discrete_eps2,
                  prec=cfg.precision)
    return Report(_SUM_HEADER, [_sum_row(b)])


def _sweep(cfg: RunConfig) -> Report:
    rows = []
    for D in cfg.values:
        spec = PotentialSpec("poschl_teller", {"D": D})
        n = cfg.N or math.floor(pt_lambda(D))
        b = breakdown(spec, n, cfg.convention, cfg.order, cfg.discrete_eps2, prec=cfg.precision)
        rows.append([D] + _sum_row(b) + [abs(b.error / b.exact)])
    return Report(["D"] + _SUM_HEADER + ["rel_error"], rows)


def _tf(cfg: RunConfig) -> Report:
    if cfg.target == "gea":
        rows = [(r.eta, cfg.N, cfg.cell_length, r.t_exact, r.t_tf, r.t_vw, r.t_gea, r.ratio)
                for r in gea_study(cfg.values, cfg.N, cfg.cell_length)]
        return Report(["eta", "N", "L", "t_exact", "t_tf", "t_vw", "t_gea", "ratio"], rows)
    spec = cfg.potential
    parts = tf_energy_parts(spec, cfg.N)
    energy = parts.total
    try:
        exact = float(exact_sum(spec, cfg.N, cfg.precision))
    except SemisumError:
        exact = None
    return Report(["N", "mu", "t_tf", "int_nv", "e_tf", "exact", "error"],
                  [(cfg.N, parts.mu, parts.kinetic, parts.potential, energy, exact,
                    None if exact is None else energy - exact)])


# ---------------------------------------------------------------------------
# reproductions

def _reproduce_airy_e10(cfg: RunConfig) -> Report:
    digits = len(AIRY_E10_REFERENCE.replace(".", ""))
    value = airy_zero_sum(10, max(40, cfg.precision.target_digits))
    text = mpmath.nstr(value, digits, strip_zeros=False)
    hartree = exact_sum(PotentialSpec("linear_half_well"), 10, PrecisionConfig(target_digits=40))
    ok = text == AIRY_E10_REFERENCE
    rows = [("sum_abs_airy_zeros", text, AIRY_E10_REFERENCE, ok),
            ("sum_hartree", mpmath.nstr(hartree, digits, strip_zeros=False), "", "")]
    report = Report(["quantity", "value", "reference", "match"], rows)
    if not ok:
        mismatch = next(i for i, (a, b) in enumerate(zip(text, AIRY_E10_REFERENCE)) if a != b)
        report.notes.append(f"FAIL first differing character at position {mismatch}")
        report.status = EXIT_REPRODUCE
    else:
        report.notes.append("PASS")
    return report


def _reproduce_pt_table(cfg: RunConfig) -> Report:
    spec = PotentialSpec("poschl_teller", {"D": 10.0})
    N = 4
    integral = breakdown(spec, N, "endpoint", 2, discrete_eps2=False)
    discrete = breakdown(spec, N, "endpoint", 2, discrete_eps2=True)
    values = {
        "exact": float(exact_sum(spec, N)),
        "wkb0_sum": wkb0_sum(spec, N),
        "e0_endpoint": integral.e0,
        "d2a_integral": integral.d2a,
        "d2a_discrete": discrete.d2a,
        "d2b": integral.d2b,
        "b2_endpoint": integral.em_higher[0],
        "e_tf": integral_sum(spec, N, "midpoint"),
        "total_integral_eps2": integral.total,
        "total_discrete_eps2": discrete.total,
        "error_discrete_eps2": discrete.error,
    }
    failures = [k for k, ref in PT_TABLE_REFERENCE.items() if abs(values[k] - ref) > 1e-6]
    if abs(values["total_discrete_eps2"] - values["exact"]) > 1e-3:
        failures.append("total_discrete_eps2")
    report = Report(["quantity", "value"], list(values.items()))
    _status(report, failures)
    return report


def _status(report: Report, failures):
    if failures:
        report.notes.append("FAIL " + ",".join(failures))
        report.status = EXIT_REPRODUCE
    else:
        report.notes.append("PASS")


def _strictly_decreasing(xs):
    return all(b < a for a, b in zip(xs, xs[1:]))


def _reproduce_ls_trend(cfg: RunConfig) -> Report:
    rows = []
    for D in (10.0, 100.0, 1000.0):
        spec = PotentialSpec("poschl_teller", {"D": D})
        N = math.floor(pt_lambda(D))
        exact = float(exact_sum(spec, N))
        e_tf = tf_total_energy(spec, N)
        e_end = integral_sum(spec, N, "endpoint")
        rows.append((D, N, exact, e_tf, abs((e_tf - exact) / exact), e_end,
                     abs((e_end - exact) / exact)))
    report = Report(["D", "N", "exact", "e_tf", "rel_error_tf", "e0_endpoint",
                     "rel_error_endpoint"], rows)
    failures = [name for col, name in ((4, "rel_error_tf"), (6, "rel_error_endpoint"))
                if not _strictly_decreasing([r[col] for r in rows])]
    _status(report, failures)
    return report


def _reproduce_gea_trend(cfg: RunConfig) -> Report:
    rows = gea_study((0.5, 0.2, 0.05), 5, 10.0)
    ratios = [r.ratio for r in rows]
    report = Report(["eta", "t_exact", "t_tf", "t_gea", "ratio"],
                    [(r.eta, r.t_exact, r.t_tf, r.t_gea, r.ratio) for r in rows])
    failures = []
    if not all(r < 1 for r in ratios):
        failures.append("ratio>=1")
    if not _strictly_decreasing(ratios):
        failures.append("ratio_not_decreasing")
    _status(report, failures)
    return report


_REPRODUCE = {"airy_e10": _reproduce_airy_e10, "pt_table": _reproduce_pt_table,
              "ls_trend": _reproduce_ls_trend, "gea_trend": _reproduce_gea_trend}
_RUN = {"eigs": _eigs, "wkb": _wkb, "sum": _sum, "sweep": _sweep, "tf": _tf,
        "reproduce": lambda cfg: _REPRODUCE[cfg.target](cfg)}


def run(cfg: RunConfig) -> Report:
    return _RUN[cfg.subcommand](cfg)


def main(argv: Optional[Sequence[str]] = None) -> int:
    argv = sys.argv[1:] if argv is None else argv
    try:
        cfg = parse_args(argv)
        report = run(cfg)
    except UsageError as exc:
        print(f"semisum: usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except PrecisionError as exc:
        print(f"semisum: precision failure: {exc}", file=sys.stderr)
        return EXIT_PRECISION
    except (SemisumError, ValueError) as exc:
        print(f"semisum: {exc}", file=sys.stderr)
        return EXIT_USAGE
    text = render(report, cfg.format, cfg.precision.target_digits)
    if cfg.output == "-":
        sys.stdout.write(text)
    else:
        with open(cfg.output, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    if report.status != EXIT_OK:
        print(f"semisum: reproduce {cfg.target} failed: {report.notes[-1]}", file=sys.stderr)
    return report.status


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
