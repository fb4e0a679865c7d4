"""Monte Carlo campaigns over closed lattice walks, with analytic companions.

A campaign runs n_events independent events per m; each event samples m
closed walks, tallies winding sectors, and contributes one observation per
reported quantity.  Aggregation is a block-wise sum/sum-of-squares reduce:
blocks are deterministic functions of (master_seed, event index), workers
only decide who computes which block, and blocks are merged in index order,
so the output is bit-identical for any worker count.  Completed blocks are
checkpointed to JSON per m, and an interrupted campaign resumes from there.

All areas are reported in units of the walk's continuum time t = N/2.
"""

from __future__ import annotations

import json
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import analytic
from .walks import RunSeed, brownian_time, sample_closed_walk
from .winding import tally

__all__ = ["CampaignConfig", "CampaignReport", "ReportRow", "run_campaign",
           "analytic_table", "compare_tables", "CompareVerdict"]


@dataclass
class CampaignConfig:
    m_values: list
    n_steps: int = 100_000
    n_events: int = 2000
    master_seed: int = 20260810
    workers: int = 1
    out_dir: Path = Path("campaign-out")
    n_max: int = 8
    block_size: int = 100
    collect_tuples: bool = False
    with_analytic: bool = True
    q: float = analytic.Q_DEFAULT

    def __post_init__(self):
        self.m_values = [int(m) for m in self.m_values]
        self.out_dir = Path(self.out_dir)
        if not self.m_values:
            raise ValueError("m_values must be nonempty")
        if any(m < 1 for m in self.m_values):
            raise ValueError("every m must be >= 1")
        if self.n_events < 1:
            raise ValueError("n_events must be >= 1")
        if self.n_steps < 2 or self.n_steps % 2 != 0:
            raise ValueError("n_steps must be even and >= 2")
        if self.n_max < 0:
            raise ValueError("n_max must be >= 0")
        if self.block_size < 1:
            raise ValueError("block_size must be >= 1")

    def quantity_names(self):
        names = ["S", "S0", "S00"]
        names += [f"S_n[{n}]" for n in range(-self.n_max, self.n_max + 1)]
        return names

    def fingerprint(self, m: int) -> dict:
        return {
            "m": m,
            "n_steps": self.n_steps,
            "master_seed": self.master_seed,
            "n_max": self.n_max,
            "block_size": self.block_size,
        }


def _event_observation(m, n_steps, master_seed, event_idx, n_max, collect_tuples):
    """One event: sample m walks, tally, return the raw cell-count vector."""
    walks = [sample_closed_walk(n_steps, RunSeed(master_seed, event_idx, p))
             for p in range(m)]
    t = tally(walks, collect_tuples=collect_tuples)
    # tally() itself asserts the closure identities per sample
    obs = np.empty(3 + 2 * n_max + 1, dtype=np.float64)
    obs[0] = t.s_total
    obs[1] = t.s_zero_inside
    obs[2] = t.s_all_zero_inside
    for k, n in enumerate(range(-n_max, n_max + 1)):
        obs[3 + k] = t.by_total_n.get(n, 0)
    return obs


def _run_block(args):
    (m, n_steps, master_seed, start, count, n_max, collect_tuples) = args
    dim = 3 + 2 * n_max + 1
    sums = np.zeros(dim)
    sumsq = np.zeros(dim)
    for e in range(start, start + count):
        obs = _event_observation(m, n_steps, master_seed, e, n_max, collect_tuples)
        sums += obs
        sumsq += obs * obs
    return sums, sumsq


@dataclass
class ReportRow:
    m: int
    quantity: str
    mc_value: float
    mc_stderr: float
    analytic_value: float = math.nan
    analytic_err: float = math.nan
    z: float = math.nan


@dataclass
class CampaignReport:
    n_steps: int
    n_events: int
    master_seed: int
    t: float
    rows: list = field(default_factory=list)

    def to_csv(self, path) -> None:
        path = Path(path)
        with open(path, "w", newline="") as fh:
            fh.write("m,quantity,mc_value,mc_stderr,analytic_value,analytic_err,z\n")
            for r in self.rows:
                fh.write(
                    f"{r.m},{r.quantity},{_fmt(r.mc_value)},{_fmt(r.mc_stderr)},"
                    f"{_fmt(r.analytic_value)},{_fmt(r.analytic_err)},{_fmt(r.z)}\n"
                )

    def row(self, m: int, quantity: str) -> ReportRow:
        for r in self.rows:
            if r.m == m and r.quantity == quantity:
                return r
        raise KeyError(f"no row ({m}, {quantity})")


def _fmt(x: float) -> str:
    if isinstance(x, float) and math.isnan(x):
        return ""
    return repr(float(x))


def _parse_float(s: str) -> float:
    return float(s) if s else math.nan


def read_report_csv(path) -> CampaignReport:
    rows = []
    with open(path) as fh:
        header = fh.readline().strip().split(",")
        if header != ["m", "quantity", "mc_value", "mc_stderr",
                      "analytic_value", "analytic_err", "z"]:
            raise ValueError(f"unrecognized report header in {path}")
        for line in fh:
            parts = line.rstrip("\n").split(",")
            rows.append(ReportRow(int(parts[0]), parts[1], _parse_float(parts[2]),
                                  _parse_float(parts[3]), _parse_float(parts[4]),
                                  _parse_float(parts[5]), _parse_float(parts[6])))
    rep = CampaignReport(0, 0, 0, math.nan, rows)
    return rep


# ---------------------------------------------------------------------------
# checkpointing


def _checkpoint_path(out_dir: Path, m: int) -> Path:
    return Path(out_dir) / f"checkpoint_m{m}.json"


def _load_checkpoint(path: Path, fingerprint: dict) -> dict:
    if not path.exists():
        return {}
    with open(path) as fh:
        data = json.load(fh)
    if data.get("fingerprint") != fingerprint:
        raise ValueError(
            f"checkpoint {path} belongs to a different campaign configuration; "
            "remove it or change the output directory"
        )
    return {int(k): v for k, v in data["blocks"].items()}


def _save_checkpoint(path: Path, fingerprint: dict, blocks: dict) -> None:
    tmp = path.with_suffix(".tmp")
    payload = {
        "fingerprint": fingerprint,
        "blocks": {str(k): v for k, v in sorted(blocks.items())},
    }
    with open(tmp, "w") as fh:
        json.dump(payload, fh)
    os.replace(tmp, path)


# ---------------------------------------------------------------------------
# campaign driver


def _analytic_columns(m: int, n_max: int, q: float):
    """Analytic values (value, err) per quantity, NaN where no usable form exists."""
    out = {}
    s = analytic.mean_s(m, q)
    out["S"] = (s.value, s.err)
    s00 = analytic.mean_s00(m, q)
    out["S00"] = (s00.value, s00.err)
    if m == 1:
        out["S0"] = (math.pi / 30.0, 0.0)
    elif m == 2:
        ov = analytic.overlap_two_paths(q)
        sn2 = analytic.sum_sn_2()
        out["S0"] = (2.0 * math.pi / 5.0 - ov.value - sn2.value, ov.err + sn2.err)
    elif m >= 16:
        # the zero-winding inside area converges to a finite limit; beyond
        # moderate m the limit is the best available analytic companion
        out["S0"] = (analytic.s0_limit(), math.nan)
    for n in range(0, n_max + 1):
        if n == 0:
            val = out.get("S0", (math.nan, math.nan))
        else:
            e = analytic.mean_sn(m, n)
            val = (e.value, e.err)
        out[f"S_n[{n}]"] = val
        out[f"S_n[{-n}]"] = val
    return out


def run_campaign(config: CampaignConfig) -> CampaignReport:
    """Run (or resume) the configured campaign and write report.csv."""
    out = Path(config.out_dir)
    try:
        out.mkdir(parents=True, exist_ok=True)
        probe = out / ".write-probe"
        probe.write_text("")
        probe.unlink()
    except OSError as exc:
        raise OSError(f"output directory {out} is not writable: {exc}") from exc

    t = brownian_time(config.n_steps)
    names = config.quantity_names()
    report = CampaignReport(config.n_steps, config.n_events, config.master_seed, t)

    for m in config.m_values:
        fp = config.fingerprint(m)
        ckpt_path = _checkpoint_path(out, m)
        blocks = _load_checkpoint(ckpt_path, fp)
        n_blocks = (config.n_events + config.block_size - 1) // config.block_size
        todo = []
        for b in range(n_blocks):
            start = b * config.block_size
            count = min(config.block_size, config.n_events - start)
            have = blocks.get(b)
            if have is None or have["n"] != count:
                todo.append((b, start, count))
        if todo:
            args = [(m, config.n_steps, config.master_seed, start, count,
                     config.n_max, config.collect_tuples)
                    for _, start, count in todo]
            if config.workers > 1:
                with ProcessPoolExecutor(max_workers=config.workers) as pool:
                    for (b, start, count), (sums, sumsq) in zip(
                            todo, pool.map(_run_block, args)):
                        blocks[b] = {"n": count, "sums": sums.tolist(),
                                     "sumsq": sumsq.tolist()}
                        _save_checkpoint(ckpt_path, fp, blocks)
            else:
                for (b, start, count), a in zip(todo, args):
                    sums, sumsq = _run_block(a)
                    blocks[b] = {"n": count, "sums": sums.tolist(),
                                 "sumsq": sumsq.tolist()}
                    _save_checkpoint(ckpt_path, fp, blocks)

        dim = len(names)
        total = np.zeros(dim)
        totalsq = np.zeros(dim)
        n_ev = 0
        for b in sorted(blocks):
            if b * config.block_size >= config.n_events:
                continue
            total += np.asarray(blocks[b]["sums"])
            totalsq += np.asarray(blocks[b]["sumsq"])
            n_ev += blocks[b]["n"]
        if n_ev != config.n_events:
            raise RuntimeError(f"m={m}: aggregated {n_ev} events, expected "
                               f"{config.n_events}")
        mean = total / n_ev
        if n_ev > 1:
            var = (totalsq - n_ev * mean * mean) / (n_ev - 1)
            stderr = np.sqrt(np.maximum(var, 0.0) / n_ev)
        else:
            stderr = np.full(dim, math.nan)

        acols = _analytic_columns(m, config.n_max, config.q) if config.with_analytic else {}
        for k, name in enumerate(names):
            mc_v = mean[k] / t
            mc_e = stderr[k] / t
            av, ae = acols.get(name, (math.nan, math.nan))
            z = (mc_v - av) / mc_e if (not math.isnan(av) and mc_e > 0) else math.nan
            report.rows.append(ReportRow(m, name, mc_v, mc_e, av, ae, z))

    report.to_csv(out / "report.csv")
    return report


# ---------------------------------------------------------------------------
# analytic tables and comparison


def analytic_table(quantity: str, ms=(), ns=(), tuple_ns=(), q=analytic.Q_DEFAULT):
    """Rows (m, quantity, value, err, method, definition) for one selector."""
    rows = []

    def add(m, name, est, definition):
        if isinstance(est, analytic.Estimate):
            rows.append((m, name, est.value, est.err, est.method, definition))
        else:
            rows.append((m, name, float(est), 0.0, "closed_form", definition))

    if quantity == "constants":
        add(0, "c_1", analytic.constant_cj(1), "int exp(-x) K0(x) dx")
        add(0, "c_2", analytic.constant_cj(2), "int exp(-2x) K0(x)^2 dx")
        add(0, "c_3", analytic.constant_cj(3), "int exp(-3x) K0(x)^3 dx")
        add(0, "d_2", analytic.constant_dj(2),
            "int exp(-2x) K0(x) [int exp(-x cosh u) u tanh(u/2) du] dx")
        add(0, "c22_series", analytic.c22_series(), "zeta(2)-product series for c_2")
    elif quantity == "s0-limit":
        add(0, "s0_limit", analytic.s0_limit(), "(pi/2) ln(5/pi)")
    elif quantity == "overlap":
        ov = analytic.overlap_two_paths(q)
        add(2, "overlap", ov, "2<S(1)> - <S(2)>")
        add(2, "overlap_ratio",
            analytic.Estimate(ov.value / (math.pi / 5.0), ov.err / (math.pi / 5.0),
                              ov.method),
            "(2<S(1)> - <S(2)>) / <S(1)>")
        add(2, "circle_reference", analytic.circle_overlap_reference(),
            "1/2 - 2/pi^2, two pinned circles")
        add(2, "sum_Sn_2", analytic.sum_sn_2(), "sum over n != 0 of <S_n(2)>")
        add(2, "s0_overlap", analytic.s0_overlap_two_paths(q), "2<S0(1)> - <S0(2)>")
    elif quantity == "S":
        for m in ms:
            add(m, "S", analytic.mean_s(m, q), "2 Phi_0(m) - Phi_q(m)")
    elif quantity == "S00":
        for m in ms:
            add(m, "S00", analytic.mean_s00(m, q), "Phi_0(m) - Phi_q(m)")
    elif quantity == "Phi":
        for m in ms:
            add(m, f"Phi[q={q:g}]", analytic.phi_q(m, q),
                "pi int (1 - (1-(1-q)f)^m) dx")
    elif quantity == "S-asymptotic":
        for m in ms:
            add(m, "S", analytic.mean_s_asymptotic(m),
                "(pi/2)ln m - (pi/4)ln ln m + const")
    elif quantity == "Sn":
        for m in ms:
            for n in ns:
                add(m, f"S_n[{n}]", analytic.mean_sn(m, n),
                    "phase integral of the sector transform")
    elif quantity == "S-tuple":
        for m in ms:
            e = analytic.mean_s_tuple(m, tuple_ns)
            add(m, "S_tuple[" + ",".join(str(v) for v in tuple_ns) + "]", e,
                "x-integral of the per-path kernels")
    elif quantity == "asymptotics":
        for m in ms:
            add(m, "S_asym", analytic.mean_s_asymptotic(m),
                "(pi/2)ln m - (pi/4)ln ln m + const")
            add(m, "S_minus_S0_asym", analytic.mean_s_minus_s0_asymptotic(m),
                "(pi/2)ln m - (pi/4)ln ln m + const'")
            if m >= 3:
                add(m, f"Phi_asym[q={q:g}]", analytic.phi_q_asymptotic(m, q),
                    "large-m expansion of the master integral")
    else:
        raise ValueError(
            f"unknown quantity {quantity!r}; supported: constants, s0-limit, "
            "overlap, S, S00, Phi, S-asymptotic, Sn, S-tuple, asymptotics"
        )
    return rows


def write_analytic_csv(rows, path) -> None:
    with open(path, "w", newline="") as fh:
        fh.write("m,quantity,value,err,method,definition\n")
        for m, name, value, err, method, definition in rows:
            fh.write(f"{m},{name},{_fmt(value)},{_fmt(err)},{method},{definition}\n")


def read_analytic_csv(path):
    rows = []
    with open(path) as fh:
        header = fh.readline().strip().split(",")
        if header[:4] != ["m", "quantity", "value", "err"]:
            raise ValueError(f"unrecognized analytic table header in {path}")
        for line in fh:
            parts = line.rstrip("\n").split(",")
            rows.append((int(parts[0]), parts[1], _parse_float(parts[2]),
                         _parse_float(parts[3])))
    return rows


@dataclass
class CompareVerdict:
    lines: list
    n_checked: int
    n_failed: int

    @property
    def passed(self) -> bool:
        return self.n_checked > 0 and self.n_failed == 0


def compare_tables(report: CampaignReport, analytic_rows, z_max: float = 3.0,
                   rel_max: float | None = None) -> CompareVerdict:
    """Gate MC rows against analytic rows joined on (m, quantity).

    A quantity passes if its z-score is within z_max, or, when rel_max is
    given, if the relative deviation is within rel_max.  An empty overlap of
    the two tables is an error, never a silent pass.
    """
    if not report.rows:
        raise ValueError("empty campaign report")
    amap = {(m, name): (v, e) for m, name, v, e in
            ((r[0], r[1], r[2], r[3]) for r in analytic_rows)}
    lines = []
    n_checked = 0
    n_failed = 0
    for r in report.rows:
        key = (r.m, r.quantity)
        if key not in amap:
            continue
        av, _ = amap[key]
        if math.isnan(av) or math.isnan(r.mc_value):
            continue
        n_checked += 1
        z = (r.mc_value - av) / r.mc_stderr if r.mc_stderr > 0 else math.inf
        rel = abs(r.mc_value - av) / abs(av) if av != 0 else math.inf
        ok = abs(z) <= z_max or (rel_max is not None and rel <= rel_max)
        if not ok:
            n_failed += 1
        lines.append(
            f"{'PASS' if ok else 'FAIL'} m={r.m} {r.quantity}: "
            f"mc={r.mc_value:.6g} +- {r.mc_stderr:.2g} analytic={av:.6g} "
            f"z={z:+.2f} rel={rel:.3g}"
        )
    if n_checked == 0:
        raise ValueError("report and analytic table share no comparable rows")
    lines.append(f"{n_checked - n_failed}/{n_checked} gates passed")
    return CompareVerdict(lines, n_checked, n_failed)
