"""Command-line front end: Monte Carlo campaigns, analytic tables, comparison.

Subcommands
-----------
campaign   run a Monte Carlo campaign, writing report.csv and checkpoints
analytic   evaluate analytic quantities into a CSV table (or stdout)
compare    gate a campaign report against an analytic table

Flags may also be supplied through a key=value config file (--config); flags
given on the command line win.  The default output directory comes from
WINDING_SECTORS_OUT when set.
"""

from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path

from . import analytic
from .campaign import (
    CampaignConfig,
    analytic_table,
    compare_tables,
    read_analytic_csv,
    read_report_csv,
    run_campaign,
    write_analytic_csv,
)

_ENV_OUT = "WINDING_SECTORS_OUT"


def _int_list(text: str):
    return [int(tok) for tok in text.replace(",", " ").split()]


def _load_config_file(path: str) -> dict:
    values = {}
    with open(path) as fh:
        for raw in fh:
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ValueError(f"bad config line (expected key=value): {raw!r}")
            key, val = line.split("=", 1)
            values[key.strip().replace("-", "_")] = val.strip()
    return values


def _default_out() -> str:
    return os.environ.get(_ENV_OUT, "campaign-out")


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="winding-sectors",
                                description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    c = sub.add_parser("campaign", help="run a Monte Carlo campaign")
    c.add_argument("--config", help="key=value file; command-line flags override")
    c.add_argument("--m", dest="m_values", type=_int_list,
                   help="comma-separated path counts, e.g. 4,8,16")
    c.add_argument("--steps", type=int, help="steps per walk (even)")
    c.add_argument("--events", type=int, help="independent events per m")
    c.add_argument("--seed", type=int, help="master seed")
    c.add_argument("--workers", type=int, help="worker processes")
    c.add_argument("--out", help=f"output directory (default ${_ENV_OUT} or campaign-out)")
    c.add_argument("--n-max", type=int, help="report per-winding areas up to |n|")
    c.add_argument("--block", type=int, help="events per checkpoint block")
    c.add_argument("--tuples", action="store_true", default=None,
                   help="collect per-path tuple classes (slower)")
    c.add_argument("--no-analytic", action="store_true", default=None,
                   help="skip the analytic companion columns")
    c.add_argument("--q", type=float, help="zero-winding ratio (default 0.2)")

    a = sub.add_parser("analytic", help="evaluate analytic quantities")
    a.add_argument("--quantity", required=True,
                   help="constants | s0-limit | overlap | S | S00 | Phi | "
                        "S-asymptotic | Sn | S-tuple | asymptotics")
    a.add_argument("--m", dest="m_values", type=_int_list, default=[])
    a.add_argument("--n", dest="n_values", type=_int_list, default=[])
    a.add_argument("--tuple", dest="tuple_ns", type=_int_list, default=[])
    a.add_argument("--q", type=float, default=analytic.Q_DEFAULT)
    a.add_argument("--out", help="CSV path (default: print to stdout)")

    v = sub.add_parser("compare", help="gate a report against an analytic table")
    v.add_argument("--report", required=True)
    v.add_argument("--analytic", required=True)
    v.add_argument("--out", help="verdict file (default: print to stdout)")
    v.add_argument("--z-max", type=float, default=3.0)
    v.add_argument("--rel-max", type=float, default=None)
    return p


_CONFIG_KEYS = {
    "m": ("m_values", _int_list),
    "m_values": ("m_values", _int_list),
    "steps": ("n_steps", int),
    "events": ("n_events", int),
    "seed": ("master_seed", int),
    "workers": ("workers", int),
    "out": ("out_dir", str),
    "n_max": ("n_max", int),
    "block": ("block_size", int),
    "tuples": ("collect_tuples", lambda s: s.lower() in ("1", "true", "yes")),
    "analytic": ("with_analytic", lambda s: s.lower() in ("1", "true", "yes")),
    "q": ("q", float),
}


def _campaign_config(args) -> CampaignConfig:
    kw = {}
    if args.config:
        for key, raw in _load_config_file(args.config).items():
            if key not in _CONFIG_KEYS:
                raise ValueError(f"unknown config key {key!r}")
            dest, conv = _CONFIG_KEYS[key]
            kw[dest] = conv(raw)
    if args.m_values is not None:
        kw["m_values"] = args.m_values
    if args.steps is not None:
        kw["n_steps"] = args.steps
    if args.events is not None:
        kw["n_events"] = args.events
    if args.seed is not None:
        kw["master_seed"] = args.seed
    if args.workers is not None:
        kw["workers"] = args.workers
    if args.out is not None:
        kw["out_dir"] = args.out
    elif "out_dir" not in kw:
        kw["out_dir"] = _default_out()
    if args.n_max is not None:
        kw["n_max"] = args.n_max
    if args.block is not None:
        kw["block_size"] = args.block
    if args.tuples:
        kw["collect_tuples"] = True
    if args.no_analytic:
        kw["with_analytic"] = False
    if args.q is not None:
        kw["q"] = args.q
    if "m_values" not in kw:
        raise ValueError("--m is required (or m= in the config file)")
    return CampaignConfig(**kw)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "campaign":
        config = _campaign_config(args)
        report = run_campaign(config)
        print(f"wrote {Path(config.out_dir) / 'report.csv'} "
              f"({len(report.rows)} rows, t={report.t:g})")
        return 0
    if args.command == "analytic":
        rows = analytic_table(args.quantity, ms=args.m_values, ns=args.n_values,
                              tuple_ns=args.tuple_ns, q=args.q)
        if args.out:
            write_analytic_csv(rows, args.out)
            print(f"wrote {args.out} ({len(rows)} rows)")
        else:
            for m, name, value, err, method, definition in rows:
                print(f"m={m:<6} {name:<22} {value:.10g}  (+- {err:.2g}, {method}; "
                      f"{definition})")
        return 0
    if args.command == "compare":
        report = read_report_csv(args.report)
        arows = read_analytic_csv(args.analytic)
        verdict = compare_tables(report, arows, z_max=args.z_max,
                                 rel_max=args.rel_max)
        text = "\n".join(verdict.lines)
        if args.out:
            Path(args.out).write_text(text + "\n")
        print(text)
        return 0 if verdict.passed else 1
    raise AssertionError("unreachable")


if __name__ == "__main__":
    sys.exit(main())
