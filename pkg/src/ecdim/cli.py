"""Command-line interface.

Subcommands::

    ecdim table 1..6                  reproduce an oscillator table and compare
    ecdim mdim KIND SPEC E EPS        smallest sufficient input dimension
    ecdim vbound KIND SPEC E EPS      capacity continuity bound
    ecdim bound LEMMA ...             single bound evaluations
    ecdim fmax SPEC E                 maximum entropy at mean energy E
    ecdim verify CHECK [TRIALS]       randomized inequality checks

EPS for ``mdim`` is either absolute (in units of ``--base``) or
``frac:x``, meaning x times the maximum entropy at energy E. Energies are
given in the units of the spectrum file.

Exit codes: 0 success, 1 a table cell off by more than ``--tol`` or a
verification violation, 2 usage error, 3 domain error, 4 no feasible
dimension below the cap, 5 convergence failure, 6 capability exceeded,
7 unreadable input file.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass
from typing import Optional

from . import contbounds, dimbounds
from .errors import (
    CapabilityError,
    ConvergenceError,
    DegenerateInputError,
    DomainError,
    SearchCapExceeded,
)
from .scalarfun import LogBase
from .spectrum import gibbs_entropy, load_spectrum, output_entropy_bound
from .verifier import DEFAULT_SEED, SUITES, run_suite

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_USAGE = 2
EXIT_DOMAIN = 3
EXIT_SEARCH_CAP = 4
EXIT_CONVERGENCE = 5
EXIT_CAPABILITY = 6
EXIT_INPUT = 7


@dataclass(frozen=True)
class RunConfig:
    log_base: LogBase = LogBase.NATURAL
    f_source: str = "exact"
    cap: Optional[int] = None
    tol: float = 0.05
    fmt: str = "csv"
    seed: int = DEFAULT_SEED

    def __post_init__(self):
        if not self.tol > 0:
            raise DomainError("--tol must be positive")
        if self.cap is not None and self.cap < 1:
            raise DomainError("--cap must be at least 1")


def _config(args) -> RunConfig:
    return RunConfig(LogBase.coerce(args.base), args.f_source, args.cap, args.tol,
                     args.format, args.seed)


def parse_eps(text: str):
    """Return (eps, eps_fraction) from an absolute value or ``frac:x``."""
    try:
        if text.startswith("frac:"):
            return None, float(text[5:])
        return float(text), None
    except ValueError:
        raise DomainError(f"cannot parse eps {text!r}; use a number or frac:<x>") from None


def _emit(cfg: RunConfig, record: dict, out):
    if cfg.fmt == "json":
        out.write(json.dumps(record, sort_keys=True, indent=2) + "\n")
        return
    out.write("key,value\n")
    for key, val in _flatten(record):
        out.write(f"{key},{val}\n")


def _flatten(record, prefix=""):
    for key in sorted(record):
        val = record[key]
        name = f"{prefix}{key}"
        if isinstance(val, dict):
            yield from _flatten(val, name + ".")
        elif isinstance(val, list):
            yield name, json.dumps(val, sort_keys=True)
        else:
            yield name, val


# --------------------------------------------------------------------------
# commands
# --------------------------------------------------------------------------

def cmd_table(args, cfg: RunConfig, out) -> int:
    table = dimbounds.generate_table(args.table_id, f_source=cfg.f_source, base=cfg.log_base)
    failing = table.failing(cfg.tol)
    if cfg.fmt == "json":
        rec = table.to_dict()
        rec["tolerance"] = cfg.tol
        rec["max_abs_rel_error"] = table.max_rel_error()
        rec["failing"] = [{"E_over_hbar_omega": c.E_over_hbar_omega, "capacity": c.capacity}
                          for c in failing]
        out.write(json.dumps(rec, sort_keys=True, indent=2) + "\n")
    else:
        out.write(dimbounds.table_to_csv(table))
    for c in failing:
        sys.stderr.write(f"cell E={c.E_over_hbar_omega:g} {c.capacity}: m={c.m:.3e} vs "
                         f"{c.ref_m:.2e} ({c.rel_error:+.1%}) exceeds tolerance {cfg.tol:g}\n")
    return EXIT_CHECK_FAILED if failing else EXIT_OK


def cmd_mdim(args, cfg: RunConfig, out) -> int:
    spec = load_spectrum(args.spectrum)
    eps, frac = parse_eps(args.eps)
    limited = args.alpha is not None or args.ec is not None
    if limited:
        params = dimbounds.EnergyLimitParams(1.0 if args.alpha is None else args.alpha,
                                             0.0 if args.ec is None else args.ec)
        specB = load_spectrum(args.output_spectrum) if args.output_spectrum else spec
        fB = output_entropy_bound(specB, cfg.f_source)
        res = dimbounds.m_theorem2(args.kind, spec, fB, params, args.energy, eps,
                                   eps_fraction=frac, base=cfg.log_base, cap=cfg.cap)
        floor = dimbounds.admissible_floor(spec, args.energy, theorem=2)
    else:
        res = dimbounds.m_theorem1(args.kind, spec, args.energy, eps, eps_fraction=frac,
                                   source=cfg.f_source, base=cfg.log_base, cap=cfg.cap)
        floor = dimbounds.admissible_floor(spec, args.energy, theorem=1)
    m = res.witnesses["m"]
    rec = {
        "capacity": dimbounds.CapacityKind.coerce(args.kind).label,
        "energy": args.energy,
        "eps": args.eps,
        "m": m,
        "f_value": res.value,
        "witnesses": res.witnesses,
        "log_base": cfg.log_base.value,
        "energy_limited": limited,
        "floor": floor,
        "floor_binding": m == floor,
    }
    _emit(cfg, rec, out)
    return EXIT_OK


def cmd_vbound(args, cfg: RunConfig, out) -> int:
    spec = load_spectrum(args.spectrum)
    res = contbounds.v_theorem3(args.kind, spec, args.energy, args.eps, source=cfg.f_source,
                                base=cfg.log_base, cap=cfg.cap)
    rec = {"kind": dimbounds.CapacityKind.coerce(args.kind).label, "E": args.energy,
           "eps": args.eps, "value": res.value, "witness_m": res.witnesses["m"],
           "cap": res.witnesses["cap"], "log_base": cfg.log_base.value,
           "f_source": cfg.f_source}
    _emit(cfg, rec, out)
    return EXIT_OK


def cmd_fmax(args, cfg: RunConfig, out) -> int:
    spec = load_spectrum(args.spectrum)
    sol = gibbs_entropy(spec, args.energy, cfg.log_base)
    lam = sol.lam if sol.lam != float("inf") else "inf"
    rec = {"energy": args.energy, "entropy": sol.entropy, "lambda": lam,
           "mean_energy": sol.mean_energy, "log_base": cfg.log_base.value}
    _emit(cfg, rec, out)
    return EXIT_OK


def cmd_bound(args, cfg: RunConfig, out) -> int:
    spec = load_spectrum(args.spectrum)
    rec = {"lemma": args.lemma, "log_base": cfg.log_base.value}
    if args.lemma == "lemma1":
        def fstar(x):
            return gibbs_entropy(spec, x).entropy
        rec["value"] = contbounds.lemma1_bound(args.eps, args.energy, fstar, args.variant,
                                               cfg.log_base)
        rec.update(eps=args.eps, energy=args.energy, variant=args.variant)
    elif args.lemma == "lemma2":
        rec["value"] = contbounds.lemma2_f(spec, args.energy, args.m, args.variant,
                                           source=cfg.f_source, base=cfg.log_base)
        rec.update(energy=args.energy, m=args.m, variant=args.variant)
    elif args.lemma == "lemma5":
        params = dimbounds.EnergyLimitParams(args.alpha, args.ec)
        fB = output_entropy_bound(spec, cfg.f_source)
        rec["value"] = contbounds.lemma5_bound(args.eps, args.energy, params, fB, args.p, args.t,
                                               args.per_copy, cfg.log_base)
        rec.update(eps=args.eps, energy=args.energy, alpha=args.alpha, ec=args.ec,
                   p=args.p, t=args.t, per_copy=args.per_copy)
    else:
        rec["value"] = contbounds.truncation_distance(spec, args.energy, args.m)
        rec.update(energy=args.energy, m=args.m)
        rec.pop("log_base")
    _emit(cfg, rec, out)
    return EXIT_OK


def cmd_verify(args, cfg: RunConfig, out) -> int:
    names = sorted(SUITES) if args.check == "all" else [args.check]
    reports = [run_suite(name, args.trials, cfg.seed) for name in names]
    if cfg.fmt == "json":
        recs = [r.to_dict() for r in reports]
        out.write(json.dumps(recs[0] if len(recs) == 1 else recs, sort_keys=True, indent=2) + "\n")
    else:
        out.write("check,trials,evaluated,skipped,violations,max_margin_used,seed\n")
        for r in reports:
            out.write(f"{r.check},{r.trials},{r.evaluated},{r.skipped},{len(r.violations)},"
                      f"{r.to_dict()['max_margin_used']},{r.seed}\n")
    return EXIT_OK if all(r.passed for r in reports) else EXIT_CHECK_FAILED


# --------------------------------------------------------------------------
# parser
# --------------------------------------------------------------------------

KIND_CHOICES = ["chi", "c", "ea", "q", "p"]


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--base", choices=["nat", "two"], default="nat",
                        help="logarithm base of reported entropies (default nat)")
    common.add_argument("--format", choices=["csv", "json"], default="csv")
    common.add_argument("--f-source", choices=["exact", "fhat"], default="exact",
                        help="exact Gibbs entropy or the oscillator upper bound")
    common.add_argument("--cap", type=int, default=None, help="search cap on m")
    common.add_argument("--tol", type=float, default=0.05,
                        help="relative tolerance for table comparison (default 0.05)")
    common.add_argument("--seed", type=int, default=DEFAULT_SEED)

    parser = argparse.ArgumentParser(prog="ecdim", description=__doc__.split("\n")[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("table", parents=[common], help="reproduce an oscillator table")
    p.add_argument("table_id", type=int, choices=range(1, 7), metavar="{1..6}")
    p.set_defaults(func=cmd_table)

    p = sub.add_parser("mdim", parents=[common], help="sufficient input dimension")
    p.add_argument("kind", choices=KIND_CHOICES)
    p.add_argument("spectrum")
    p.add_argument("energy", type=float)
    p.add_argument("eps", help="absolute eps or frac:<x>")
    p.add_argument("--alpha", type=float, default=None,
                   help="energy-limited channels: output energy <= alpha E + Ec")
    p.add_argument("--ec", type=float, default=None)
    p.add_argument("--output-spectrum", default=None,
                   help="spectrum file of the output system (default: same as input)")
    p.set_defaults(func=cmd_mdim)

    p = sub.add_parser("vbound", parents=[common], help="capacity continuity bound")
    p.add_argument("kind", choices=["chi", "c", "q", "p"])
    p.add_argument("spectrum")
    p.add_argument("energy", type=float)
    p.add_argument("eps", type=float)
    p.set_defaults(func=cmd_vbound)

    p = sub.add_parser("fmax", parents=[common], help="maximum entropy at mean energy E")
    p.add_argument("spectrum")
    p.add_argument("energy", type=float)
    p.set_defaults(func=cmd_fmax)

    p = sub.add_parser("bound", help="evaluate a single bound")
    lem = p.add_subparsers(dest="lemma", required=True)
    q = lem.add_parser("lemma1", parents=[common], help="QCMI continuity")
    q.add_argument("spectrum", help="spectrum of the energy observable on AD")
    q.add_argument("eps", type=float)
    q.add_argument("energy", type=float)
    q.add_argument("--variant", default="general",
                   choices=[v.value for v in contbounds.Lemma1Variant])
    q = lem.add_parser("lemma2", parents=[common], help="mutual information under truncation")
    q.add_argument("spectrum")
    q.add_argument("energy", type=float)
    q.add_argument("m", type=int)
    q.add_argument("--variant", default="general",
                   choices=[v.value for v in contbounds.Lemma2Variant])
    q = lem.add_parser("lemma5", parents=[common], help="energy-limited QCMI continuity")
    q.add_argument("spectrum", help="spectrum of the output system")
    q.add_argument("eps", type=float)
    q.add_argument("energy", type=float)
    q.add_argument("--alpha", type=float, default=1.0)
    q.add_argument("--ec", type=float, default=0.0)
    q.add_argument("--p", type=float, default=2.0)
    q.add_argument("--t", type=float, default=0.1)
    q.add_argument("--per-copy", action="store_true")
    q = lem.add_parser("truncation", parents=[common], help="distance to the truncated channel")
    q.add_argument("spectrum")
    q.add_argument("energy", type=float)
    q.add_argument("m", type=int)
    p.set_defaults(func=cmd_bound)

    p = sub.add_parser("verify", parents=[common], help="randomized inequality checks")
    p.add_argument("check", choices=sorted(SUITES) + ["all"])
    p.add_argument("trials", type=int, nargs="?", default=None,
                   help="number of trials (default depends on the check)")
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv=None, out=None) -> int:
    out = out or sys.stdout
    args = build_parser().parse_args(argv)
    try:
        cfg = _config(args)
        return args.func(args, cfg, out)
    except SearchCapExceeded as exc:
        sys.stderr.write(f"error: {exc} (incumbent m={exc.incumbent}, bound={exc.value})\n")
        return EXIT_SEARCH_CAP
    except (DomainError, DegenerateInputError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_DOMAIN
    except ConvergenceError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_CONVERGENCE
    except CapabilityError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_CAPABILITY
    except (OSError, json.JSONDecodeError, KeyError) as exc:
        sys.stderr.write(f"error: cannot read input: {exc}\n")
        return EXIT_INPUT


def main_entry():
    sys.exit(main())


if __name__ == "__main__":
    main_entry()
