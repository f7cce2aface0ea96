"""Command-line interface: ``siegelsign <command> [flags]``.

Exit status is 0 on success, 2 on usage errors (nothing is computed or
written) and 1 on domain errors raised by the library.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable

from .analytic import (
    BOUND_NAMES,
    BOUND_PARAMETERS,
    BoundParams,
    _MODES,
    deligne_check,
    evaluate_bound,
    partial_sums,
    normalized_from_qexp,
)
from .errors import DomainError
from .jacobi import (
    JacobiExpansion,
    dump_jacobi,
    first_nonzero_taylor_index,
    jacobi_cusp_phi,
    taylor_coefficient,
)
from .series import EtaQuotientSpec, eta_quotient, newform_catalog
from .siegel import (
    count_signs_interval,
    dump_siegel,
    first_sign_change,
    fourier_jacobi_slice,
    maass_lift,
    required_jacobi_precision,
    scan_signs,
)

DEFAULT_TRACE_BOUND = 30
DEFAULT_ELLIPTIC_PRECISION = 2000
JACOBI_FORMS = {"phi10": 10, "phi12": 12}


class UsageError(Exception):
    pass


@dataclass
class Report:
    """A serializable command result."""

    data: dict
    header: list[str]
    rows: list[list] = field(default_factory=list)
    text: str | None = None


def _cell(v) -> str:
    if isinstance(v, float):
        return format(v, ".17g")
    if v is None:
        return ""
    return str(v)


def render_report(report: Report, fmt: str) -> bytes:
    """Deterministic bytes for json (sorted keys), csv (header row) or text."""
    if fmt == "json":
        out = json.dumps(report.data, sort_keys=True, indent=2)
    elif fmt == "csv":
        lines = [",".join(report.header)]
        lines += [",".join(_cell(v) for v in row) for row in report.rows]
        out = "\n".join(lines)
    elif fmt == "text":
        if report.text is not None:
            out = report.text
        else:
            table = [report.header] + [[_cell(v) for v in row] for row in report.rows]
            widths = [max(len(r[i]) for r in table) for i in range(len(report.header))]
            out = "\n".join(
                "  ".join(c.ljust(w) for c, w in zip(r, widths)).rstrip() for r in table
            )
    else:
        raise UsageError(f"unknown format {fmt!r}")
    return (out.rstrip("\n") + "\n").encode("utf-8")


# form references -----------------------------------------------------------


@dataclass(frozen=True)
class FormRef:
    kind: str  # jacobi, lift, newform, eta
    value: str

    @classmethod
    def parse(cls, text: str) -> FormRef:
        if text in JACOBI_FORMS:
            return cls("jacobi", text)
        prefix, sep, rest = text.partition(":")
        if sep and prefix == "lift" and rest in JACOBI_FORMS:
            return cls("lift", rest)
        if sep and prefix == "newform" and rest:
            return cls("newform", rest)
        if sep and prefix == "eta" and rest:
            try:
                EtaQuotientSpec.parse(rest)
            except DomainError as exc:
                raise UsageError(str(exc)) from None
            return cls("eta", rest)
        raise UsageError(
            f"bad form reference {text!r}; use phi10, phi12, lift:phi10, "
            "lift:phi12, newform:<k.N> or eta:<d^e,...>"
        )


def _require_kind(ref: FormRef, kinds: tuple[str, ...], command: str):
    if ref.kind not in kinds:
        raise UsageError(f"{command} does not accept a {ref.kind} form")


def _trace_bound(args) -> int:
    return DEFAULT_TRACE_BOUND if args.prec is None else args.prec


def _siegel(ref: FormRef, trace_bound: int):
    phi = jacobi_cusp_phi(JACOBI_FORMS[ref.value], required_jacobi_precision(trace_bound))
    return maass_lift(phi, trace_bound)


def _jacobi(ref: FormRef, args) -> JacobiExpansion:
    if ref.kind == "jacobi":
        return jacobi_cusp_phi(JACOBI_FORMS[ref.value], _trace_bound(args))
    return fourier_jacobi_slice(_siegel(ref, _trace_bound(args)), args.m)


def _elliptic(ref: FormRef, args, precision: int):
    """(q-expansion, weight, level) of an elliptic form reference."""
    if ref.kind == "newform":
        spec = newform_catalog(ref.value)
        return spec.qexp(precision), spec.weight, spec.level
    spec = EtaQuotientSpec.parse(ref.value)
    f = eta_quotient(spec, precision)
    k = args.k if args.k is not None else f.weight
    if k is None:
        raise DomainError(f"eta quotient {spec} has no integral weight; pass --k")
    return f, k, args.N or 1


def _mat(T):
    return None if T is None else list(T.as_tuple())


# commands ----------------------------------------------------------------


def cmd_lift(args) -> Report:
    ref = FormRef.parse(args.form)
    _require_kind(ref, ("jacobi", "lift"), "lift")
    F = _siegel(ref, _trace_bound(args))
    rows = [[T.n, T.r, T.m, str(a)] for T, a in F.items()]
    data = {"k": F.weight, "N": F.level, "trace_bound": F.trace_bound, "coeffs": rows}
    return Report(data, ["n", "r", "m", "value"], rows, dump_siegel(F))


def cmd_slice(args) -> Report:
    ref = FormRef.parse(args.form)
    _require_kind(ref, ("lift",), "slice")
    phi = fourier_jacobi_slice(_siegel(ref, _trace_bound(args)), args.m)
    rows = [[n, r, str(phi[n, r])] for n, r in phi.keys()]
    data = {"k": phi.weight, "m": phi.index, "precision": phi.precision, "coeffs": rows}
    return Report(data, ["n", "r", "value"], rows, dump_jacobi(phi))


def cmd_taylor(args) -> Report:
    ref = FormRef.parse(args.form)
    _require_kind(ref, ("jacobi", "lift"), "taylor")
    phi = _jacobi(ref, args)
    if args.nu is not None:
        chi = taylor_coefficient(phi, args.nu)
        alpha = sign = bound = None
        nu = args.nu
    else:
        rep = first_nonzero_taylor_index(phi)
        chi, alpha, sign, bound, nu = (
            rep.chi_alpha_normalized, rep.alpha, rep.i_alpha_sign, rep.alpha_bound, rep.alpha,
        )
    coeffs = [str(c) for c in chi.coefficients()]
    data = {"nu": nu, "alpha": alpha, "alpha_bound": bound, "i_alpha_sign": sign,
            "coefficients": coeffs}
    return Report(data, ["n", "value"], [[n, c] for n, c in enumerate(coeffs)])


def cmd_scan(args) -> Report:
    ref = FormRef.parse(args.form)
    _require_kind(ref, ("lift",), "scan")
    rep = scan_signs(_siegel(ref, _trace_bound(args)), args.x, args.h)
    header = ["x", "x_plus_h", "t_plus", "t_minus", "positives", "negatives"]
    fmt = lambda T: "" if T is None else " ".join(map(str, T.as_tuple()))
    row = [rep.interval[0], rep.interval[1], fmt(rep.t_plus), fmt(rep.t_minus),
           rep.positives, rep.negatives]
    return Report(rep.to_dict(), header, [row])


def cmd_first_change(args) -> Report:
    ref = FormRef.parse(args.form)
    _require_kind(ref, ("lift",), "first-change")
    res = first_sign_change(_siegel(ref, _trace_bound(args)))
    data = {"t1": _mat(res.t1), "t2": _mat(res.t2), "max_trace": res.max_trace}
    row = [" ".join(map(str, res.t1.as_tuple())), " ".join(map(str, res.t2.as_tuple())),
           res.max_trace]
    return Report(data, ["t1", "t2", "max_trace"], [row])


def cmd_count(args) -> Report:
    ref = FormRef.parse(args.form)
    _require_kind(ref, ("lift",), "count")
    res = count_signs_interval(_siegel(ref, _trace_bound(args)), args.x)
    data = {"x": args.x, "positives": res.positives, "negatives": res.negatives}
    return Report(data, ["positives", "negatives"], [[res.positives, res.negatives]])


def cmd_rs_sum(args) -> Report:
    ref = FormRef.parse(args.form)
    _require_kind(ref, ("newform", "eta"), "rs-sum")
    f, k, level = _elliptic(ref, args, args.x)
    rep = partial_sums(normalized_from_qexp(f, k), args.x, args.mode, level)
    d = rep.to_dict()
    header = ["x", "raw", "log", "log2", "main_term", "slope"]
    return Report(d, header, [[d[h] for h in header]])


def cmd_bounds(args) -> Report:
    consts = BoundParams.from_assignments(args.const or [])
    params = {"k": args.k, "N": args.N, "ell": args.ell}
    res = evaluate_bound(args.name, {k: v for k, v in params.items() if v is not None}, consts)
    header = ["name"] + list(res.params) + ["value", "branch"]
    row = [res.name] + list(res.params.values()) + [res.value, res.branch]
    return Report(res.to_dict(), header, [row], format(res.value, ".15g"))


def _validate_bounds(args):
    missing = [p for p in BOUND_PARAMETERS[args.name] if getattr(args, p) is None]
    if missing:
        raise UsageError(f"{args.name} needs " + ", ".join(f"--{p}" for p in missing))
    try:
        BoundParams.from_assignments(args.const or [])
    except DomainError as exc:
        raise UsageError(str(exc)) from None


def cmd_deligne(args) -> Report:
    ref = FormRef.parse(args.form)
    _require_kind(ref, ("newform",), "deligne")
    up_to = args.x if args.x is not None else args.prec
    if up_to is None:
        up_to = DEFAULT_ELLIPTIC_PRECISION
    bad = deligne_check(newform_catalog(ref.value), up_to)
    data = {"form": ref.value, "up_to": up_to, "violations": bad}
    return Report(data, ["n"], [[n] for n in bad],
                  f"{len(bad)} violations up to {up_to}" + "".join(f"\n{n}" for n in bad))


COMMANDS: dict[str, tuple[Callable, tuple[str, ...]]] = {
    # command: (handler, required flags)
    "lift": (cmd_lift, ("form",)),
    "slice": (cmd_slice, ("form", "m")),
    "taylor": (cmd_taylor, ("form",)),
    "scan": (cmd_scan, ("form", "x", "h")),
    "first-change": (cmd_first_change, ("form",)),
    "count": (cmd_count, ("form", "x")),
    "rs-sum": (cmd_rs_sum, ("form", "x")),
    "bounds": (cmd_bounds, ("name",)),
    "deligne": (cmd_deligne, ("form",)),
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="siegelsign", description="Sign changes of Siegel and elliptic cusp form coefficients."
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, (_, required) in COMMANDS.items():
        p = sub.add_parser(name)
        p.add_argument("--form", required="form" in required)
        p.add_argument("--x", type=int, required="x" in required)
        p.add_argument("--h", type=int, required="h" in required)
        p.add_argument("--m", type=int, required="m" in required)
        p.add_argument("--nu", type=int)
        p.add_argument("--N", type=int)
        p.add_argument("--k", type=int)
        p.add_argument("--ell", type=int)
        p.add_argument("--name", required="name" in required,
                       choices=BOUND_NAMES if name == "bounds" else None)
        p.add_argument("--mode", choices=tuple(_MODES), default="square_raw")
        p.add_argument("--prec", type=int)
        p.add_argument("--format", choices=("json", "csv", "text"), default="text")
        p.add_argument("--out")
        p.add_argument("--const", action="append", metavar="NAME=VALUE")
    return parser


def parse_and_dispatch(argv: list[str] | None = None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    handler = COMMANDS[args.command][0]
    try:
        if args.form is not None:
            FormRef.parse(args.form)
        if args.prec is not None and args.prec < 0:
            raise UsageError("--prec must be non-negative")
        if args.command == "bounds":
            _validate_bounds(args)
        report = handler(args)
    except UsageError as exc:
        print(f"{parser.prog} {args.command}: error: {exc}", file=stderr)
        return 2
    except DomainError as exc:
        print(f"error: {exc}", file=stderr)
        return 1
    payload = render_report(report, args.format)
    if args.out:
        Path(args.out).write_bytes(payload)
    else:
        buf = getattr(stdout, "buffer", None)
        if buf is not None:
            buf.write(payload)
            buf.flush()
        else:
            stdout.write(payload.decode("utf-8"))
    return 0


def main() -> None:
    sys.exit(parse_and_dispatch())
