"""Command-line interface: ``siegelcm <command> [options]``."""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import sys
from dataclasses import dataclass
from fractions import Fraction

import mpmath
from mpmath import mp

from .bigcomplex import BigComplex, digits_for_prec
from .cmdata import CmContext
from .cyclofield import format_elem
from .rayclass import (
    RayClassTable,
    check_magnitudes,
    cm_point,
    compute_invariants,
    enumerate_ray_classes,
    r_vector,
)
from .symplectic import SiegelPoint
from .theta import ThetaChar, big_theta, big_theta_working_prec, plan_truncation, theta_eval
from .verify import SUITES, default_prec, format_report, run_suite

log = logging.getLogger("siegelcm")

COMMANDS = ("theta", "big-theta", "cm-point", "ray-classes", "invariants", "verify")
MIN_PREC = 64


class UsageError(ValueError):
    pass


@dataclass(frozen=True)
class RunConfig:
    command: str
    ell: int
    N: int
    prec_bits: int
    output_format: str
    seed: int
    suite: str | None = None
    char: str | None = None
    point: str | None = None
    jobs: int = 1

    def __post_init__(self):
        if self.command not in COMMANDS:
            raise UsageError(f"unknown command {self.command!r}")
        if self.prec_bits < MIN_PREC:
            raise UsageError(f"--prec must be at least {MIN_PREC} bits")


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="siegelcm", description=(
        "Theta constants, CM points and Siegel invariants of ray classes of Q(zeta_l)."))
    p.add_argument("command", choices=COMMANDS)
    p.add_argument("--ell", type=int, default=5, help="odd prime l (default 5)")
    p.add_argument("--N", type=int, default=5, help="conductor N O_K / theta level (default 5)")
    p.add_argument("--prec", type=int, default=None,
                   help="precision in bits (default 512 for N <= 5, 768 above; 256 for theta)")
    p.add_argument("--format", dest="output_format", choices=("table", "json", "csv"), default="table")
    p.add_argument("--seed", type=int, default=0, help="seed for the randomized suites")
    p.add_argument("--suite", choices=SUITES, default=None, help="verify: one suite (default all)")
    p.add_argument("--char", default=None,
                   help="theta/big-theta: characteristic r_1,..,r_g,s_1,..,s_g, e.g. 1/5,2/5,0,3/5")
    p.add_argument("--Z", dest="point", default=None,
                   help="theta/big-theta: Siegel point as JSON [[[re, im], ...], ...] "
                        "(default: the CM point of --ell)")
    p.add_argument("--jobs", type=int, default=1, help="worker processes for invariants")
    p.add_argument("--out", default=None, help="write output to this file")
    p.add_argument("-v", "--verbose", action="store_true")
    return p


def config_from_args(args: argparse.Namespace) -> RunConfig:
    prec = args.prec
    if prec is None:
        prec = default_prec(args.N) if args.command in ("invariants", "cm-point", "verify") else 256
    return RunConfig(args.command, args.ell, args.N, prec, args.output_format, args.seed,
                     args.suite, args.char, args.point, args.jobs)


# -- serialization ---------------------------------------------------------------

def dump_json(obj) -> str:
    """Canonical JSON: sorted keys, two-space indent, trailing newline."""
    return json.dumps(obj, sort_keys=True, indent=2) + "\n"


def point_json(Z: SiegelPoint, digits: int) -> list[list[dict[str, str]]]:
    return [[BigComplex(x, Z.prec).to_json(digits) for x in row] for row in Z.entries]


def fraction_strings(numerators, N: int) -> list[str]:
    return [str(Fraction(k, N)) for k in numerators]


def table_json(table: RayClassTable) -> dict:
    digits = digits_for_prec(table.prec)
    return {
        "ell": table.ell,
        "N": table.N,
        "prec_bits": table.prec,
        "cm_point": point_json(table.cm_point, digits),
        "classes": [
            {
                "label": c.name,
                "r_vector": fraction_strings(table.r_vectors[c.label], table.N),
                "theta": table.invariants[c.label].to_json(digits),
            }
            for c in table.classes
        ],
    }


def table_csv(table: RayClassTable) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["label", "r_vector", "re", "im"])
    for c in table.classes:
        v = table.invariants[c.label].to_json(6)
        w.writerow([c.name, ";".join(fraction_strings(table.r_vectors[c.label], table.N)),
                    v["re"], v["im"]])
    return buf.getvalue()


def structure_text(table: RayClassTable) -> str:
    if not table.group_structure:
        return "trivial"
    return " x ".join(f"Z/{d}Z" for d in table.group_structure)


def table_text(table: RayClassTable) -> str:
    lines = [f"Cl({table.N} O_K), K = Q(zeta_{table.ell}): {structure_text(table)}; "
             f"{table.prec} bits"]
    rows = [(c.name, "[" + ", ".join(fraction_strings(table.r_vectors[c.label], table.N)) + "]",
             table.invariants[c.label].short(6)) for c in table.classes]
    w0 = max(len("class"), *(len(r[0]) for r in rows))
    w1 = max(len("r-vector"), *(len(r[1]) for r in rows))
    lines.append(f"{'class':<{w0}}  {'r-vector':<{w1}}  Theta")
    for a, b, v in rows:
        lines.append(f"{a:<{w0}}  {b:<{w1}}  {v}")
    lines += [f"note: {n}" for n in table.notes]
    return "\n".join(lines) + "\n"


def parse_char(text: str | None) -> ThetaChar:
    if not text:
        raise UsageError("--char is required, e.g. --char 1/5,2/5,0,3/5")
    try:
        return ThetaChar.from_vector([Fraction(t.strip()) for t in text.split(",")])
    except (ValueError, ZeroDivisionError) as exc:
        raise UsageError(f"bad characteristic {text!r}: {exc}") from exc


def parse_point(text: str, prec: int) -> SiegelPoint:
    try:
        rows = json.loads(text)
        with mpmath.workprec(prec):
            Z = [[mp.mpc(mp.mpf(str(re)), mp.mpf(str(im))) for re, im in row] for row in rows]
    except (ValueError, TypeError) as exc:
        raise UsageError(f"bad --Z value: {exc}") from exc
    return SiegelPoint.from_matrix(Z, prec)


# -- commands ------------------------------------------------------------------

def _theta_like(cfg: RunConfig, level: bool) -> str:
    v = parse_char(cfg.char)
    if level:
        # --N is the level when the characteristic lies in (1/N)Z^2g
        N = cfg.N if all((cfg.N * x).denominator == 1 for x in v.vector) else v.denominator
        wp = big_theta_working_prec(v.g, N, cfg.prec_bits)
    else:
        wp = cfg.prec_bits + 32
    if cfg.point is not None:
        Z = parse_point(cfg.point, wp)
    else:
        ctx = CmContext.for_prime(cfg.ell)
        Z = cm_point(ctx, wp)
    if Z.g != v.g:
        raise UsageError(f"characteristic has genus {v.g} but the point has genus {Z.g}")
    digits = digits_for_prec(cfg.prec_bits)
    if level:
        val = big_theta(v, Z, cfg.prec_bits, N=N)
        info = {"N": N}
    else:
        plan = plan_truncation(Z, v, cfg.prec_bits + 20)
        val = theta_eval(v, Z, cfg.prec_bits, plan)
        info = {"radius": plan.radius, "log2_tail": round(plan.log2_tail, 1)}
    if cfg.output_format == "json":
        return dump_json({"char": [str(x) for x in v.vector], "prec_bits": cfg.prec_bits,
                          "value": val.to_json(digits), **info})
    if cfg.output_format == "csv":
        j = val.to_json(digits)
        return f"char,re,im\n{';'.join(str(x) for x in v.vector)},{j['re']},{j['im']}\n"
    extra = ", ".join(f"{k} = {x}" for k, x in info.items())
    name = "Theta" if level else "theta"
    return f"{name}{v} = {val.short(digits)}\n({cfg.prec_bits} bits; {extra})\n"


def cmd_cm_point(cfg: RunConfig) -> str:
    ctx = CmContext.for_prime(cfg.ell)
    Z = cm_point(ctx, cfg.prec_bits)
    digits = digits_for_prec(cfg.prec_bits)
    if cfg.output_format == "json":
        return dump_json({"ell": cfg.ell, "prec_bits": cfg.prec_bits, "cm_point": point_json(Z, digits)})
    if cfg.output_format == "csv":
        out = ["i,j,re,im"]
        for i, row in enumerate(Z.entries):
            for j, x in enumerate(row):
                d = BigComplex(x, Z.prec).to_json(digits)
                out.append(f"{i},{j},{d['re']},{d['im']}")
        return "\n".join(out) + "\n"
    lines = [f"CM point for l = {cfg.ell} ({cfg.prec_bits} bits)"]
    for i, row in enumerate(Z.entries):
        for j, x in enumerate(row):
            lines.append(f"Z[{i},{j}] = {BigComplex(x, Z.prec).short(30)}")
    return "\n".join(lines) + "\n"


def cmd_ray_classes(cfg: RunConfig) -> str:
    table = enumerate_ray_classes(cfg.ell, cfg.N)
    ctx = CmContext.for_prime(cfg.ell)
    rows = [(c.name, format_elem(c.representative),
             fraction_strings(r_vector(ctx, table, c), cfg.N)) for c in table.classes]
    if cfg.output_format == "json":
        return dump_json({
            "ell": cfg.ell, "N": cfg.N, "group_structure": list(table.group_structure),
            "order": table.order, "residue_units": table.residue_unit_count,
            "unit_image": table.unit_image_order,
            "classes": [{"label": a, "representative": b, "r_vector": r} for a, b, r in rows],
            "notes": list(table.notes),
        })
    if cfg.output_format == "csv":
        return "label,representative,r_vector\n" + "".join(
            f"{a},{b},{';'.join(r)}\n" for a, b, r in rows)
    lines = [f"Cl({cfg.N} O_K), K = Q(zeta_{cfg.ell}): {structure_text(table)} "
             f"(order {table.order} = {table.residue_unit_count} residue units / "
             f"{table.unit_image_order} unit images)"]
    for a, b, r in rows:
        lines.append(f"{a:<6} {b:<28} [{', '.join(r)}]")
    lines += [f"note: {n}" for n in table.notes]
    return "\n".join(lines) + "\n"


def cmd_invariants(cfg: RunConfig) -> str:
    table = enumerate_ray_classes(cfg.ell, cfg.N)
    table = compute_invariants(table, cfg.prec_bits, jobs=cfg.jobs)
    check_magnitudes(table)
    if cfg.output_format == "json":
        return dump_json(table_json(table))
    if cfg.output_format == "csv":
        return table_csv(table)
    return table_text(table)


def cmd_verify(cfg: RunConfig) -> tuple[str, bool]:
    names = [cfg.suite] if cfg.suite else list(SUITES)
    reports = []
    for name in names:
        log.info("running suite %s", name)
        prec = cfg.prec_bits if cfg.suite == "rayclass" else None
        reports.append(run_suite(name, seed=cfg.seed, ell=cfg.ell, N=cfg.N, prec=prec))
    ok = all(r.passed for r in reports)
    if cfg.output_format == "json":
        return dump_json({r.suite: {c.name: {"passed": c.passed, "cases": len(c.residuals),
                                             "max_log2_residual": _json_float(c.worst),
                                             "log2_threshold": round(c.threshold, 2)}
                                    for c in r.checks} for r in reports}), ok
    text = "\n".join(format_report(r) for r in reports)
    text += f"\n{'all suites passed' if ok else 'FAILED'}\n"
    return text, ok


def _json_float(x: float):
    # -inf marks an exact check
    return None if x == float("-inf") else round(x, 2)


def run(cfg: RunConfig) -> tuple[str, int]:
    if cfg.command == "theta":
        return _theta_like(cfg, level=False), 0
    if cfg.command == "big-theta":
        return _theta_like(cfg, level=True), 0
    if cfg.command == "cm-point":
        return cmd_cm_point(cfg), 0
    if cfg.command == "ray-classes":
        return cmd_ray_classes(cfg), 0
    if cfg.command == "invariants":
        return cmd_invariants(cfg), 0
    text, ok = cmd_verify(cfg)
    return text, 0 if ok else 1


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = config_from_args(args)
        text, code = run(cfg)
    except (ValueError, ArithmeticError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return code
