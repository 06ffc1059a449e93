"""Command-line front end: argument parsing, file IO, serialization, sweeps.

Outputs are two TSV files (correlation records and patterns), an optional
directory of DOT exports, and a JSON manifest capturing everything needed
to reproduce the run byte-for-byte.

Exit codes: 0 success, 1 usage error, 2 input-format error, 3 expansion
ceiling exceeded in fail-fast mode.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import logging
import math
import sys
import time
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path

from . import __version__
from .graph import AttributedGraph, GraphFormatError, GraphView, induced_view, load_graph
from .index import build_index, vertex_set
from .miner import MinerConfig, MiningResult, PatternRecord, run_naive, run_scpm
from .nullmodel import ANALYTICAL, SIMULATION, NullModelConfig
from .quasiclique import (
    DEFAULT_EXPANSION_BUDGET,
    QuasiCliqueParams,
    SearchBudgetExceeded,
    SearchStrategy,
)

RECORDS_HEADER = "# attribute_set\tsupport\teps\teps_exp\tdelta\tcovered_count"
PATTERNS_HEADER = "# attribute_set\tsize\tdensity\tvertices"

_SWEEP_PARAMS = {
    "gamma": "gamma_min",
    "gamma-min": "gamma_min",
    "gamma_min": "gamma_min",
    "min-size": "min_size",
    "min_size": "min_size",
    "sigma-min": "sigma_min",
    "sigma_min": "sigma_min",
}


class UsageError(Exception):
    """Bad flags or flag values; maps to exit code 1."""


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(
        prog="scpm",
        description="Mine attribute sets correlated with dense subgraphs in an attributed graph.",
    )
    p.add_argument("--graph", required=True, help="edge file: one 'u v' pair per line")
    p.add_argument("--attributes", required=True, help="attribute file: 'vertex tok tok ...' per line")
    p.add_argument("--sigma-min", type=int, required=True, help="minimum attribute-set support")
    p.add_argument("--gamma-min", required=True, help="quasi-clique density threshold, e.g. 0.6 or 3/5")
    p.add_argument("--min-size", type=int, required=True, help="minimum quasi-clique size")
    p.add_argument("--eps-min", type=float, default=0.0, help="minimum structural correlation")
    p.add_argument("--delta-min", type=float, default=0.0, help="minimum normalized correlation")
    p.add_argument("--top-k", default="5", help="patterns per attribute set: a count or 'all'")
    p.add_argument("--strategy", choices=["bfs", "dfs"], default="dfs", help="coverage search order")
    p.add_argument(
        "--null-model", choices=[ANALYTICAL, SIMULATION], default=ANALYTICAL,
        help="expected-correlation model",
    )
    p.add_argument("--samples", type=int, default=100, help="simulation sample count")
    p.add_argument("--seed", type=int, default=0, help="simulation seed")
    p.add_argument("--baseline", action="store_true", help="use the exhaustive baseline miner")
    p.add_argument("--max-set-size", type=int, default=None, help="cap on attribute-set size")
    p.add_argument("--threads", type=int, default=1, help="worker cap for the miner")
    p.add_argument("--sweep", default=None, metavar="PARAM=START:END:STEP",
                   help="run once per value of gamma/min-size/sigma-min")
    p.add_argument("--out-records", default="records.tsv", help="records TSV path")
    p.add_argument("--out-patterns", default="patterns.tsv", help="patterns TSV path")
    p.add_argument("--export-dot", default=None, metavar="DIR", help="write one DOT file per pattern")
    p.add_argument("--fail-fast", action="store_true",
                   help="abort with exit code 3 when the expansion ceiling is hit")
    p.add_argument("--max-expansions", type=int, default=DEFAULT_EXPANSION_BUDGET,
                   help="candidate-expansion ceiling per induced graph")
    return p


def _parse_gamma(text: str) -> Fraction:
    try:
        gamma = Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise UsageError(f"--gamma-min: not a number: {text!r}") from None
    if not 0 < gamma <= 1:
        raise UsageError(f"--gamma-min must be in (0, 1], got {text}")
    return gamma


def _parse_top_k(text: str) -> int | None:
    if text == "all":
        return None
    try:
        k = int(text)
    except ValueError:
        raise UsageError(f"--top-k: expected a count or 'all', got {text!r}") from None
    if k < 1:
        raise UsageError("--top-k must be at least 1")
    return k


def _parse_sweep(text: str):
    name, sep, rng = text.partition("=")
    param = _SWEEP_PARAMS.get(name.strip())
    if not sep or param is None:
        raise UsageError(f"--sweep: expected PARAM=START:END:STEP with PARAM one of "
                         f"gamma, min-size, sigma-min; got {text!r}")
    parts = rng.split(":")
    if len(parts) != 3:
        raise UsageError(f"--sweep: expected START:END:STEP, got {rng!r}")
    try:
        if param == "gamma_min":
            start, end, step = (Fraction(x) for x in parts)
        else:
            start, end, step = (int(x) for x in parts)
    except (ValueError, ZeroDivisionError):
        raise UsageError(f"--sweep: bad numeric range {rng!r}") from None
    if step <= 0 or end < start:
        raise UsageError("--sweep: need START <= END and STEP > 0")
    values = []
    v = start
    while v <= end:
        values.append(v)
        v += step
    return param, values


def _config_from_args(args) -> MinerConfig:
    gamma = _parse_gamma(args.gamma_min)
    try:
        params = QuasiCliqueParams(gamma_min=gamma, min_size=args.min_size)
        null_cfg = NullModelConfig(kind=args.null_model, samples=args.samples, seed=args.seed)
        return MinerConfig(
            qc_params=params,
            sigma_min=args.sigma_min,
            eps_min=args.eps_min,
            delta_min=args.delta_min,
            k=_parse_top_k(args.top_k),
            strategy=SearchStrategy(args.strategy),
            null_model=null_cfg,
            max_set_size=args.max_set_size,
            expansion_budget=args.max_expansions,
            fail_fast=args.fail_fast,
            threads=args.threads,
        )
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def _with_value(cfg: MinerConfig, param: str, value) -> MinerConfig:
    qc = cfg.qc_params
    try:
        if param == "gamma_min":
            qc = QuasiCliqueParams(gamma_min=value, min_size=qc.min_size)
            return _clone(cfg, qc_params=qc)
        if param == "min_size":
            qc = QuasiCliqueParams(gamma_min=qc.gamma_min, min_size=value)
            return _clone(cfg, qc_params=qc)
        return _clone(cfg, sigma_min=value)
    except ValueError as exc:
        raise UsageError(f"--sweep value {param}={value}: {exc}") from None


def _clone(cfg: MinerConfig, **overrides) -> MinerConfig:
    fields = dict(
        qc_params=cfg.qc_params,
        sigma_min=cfg.sigma_min,
        eps_min=cfg.eps_min,
        delta_min=cfg.delta_min,
        k=cfg.k,
        strategy=cfg.strategy,
        null_model=cfg.null_model,
        max_set_size=cfg.max_set_size,
        expansion_budget=cfg.expansion_budget,
        fail_fast=cfg.fail_fast,
        threads=cfg.threads,
    )
    fields.update(overrides)
    return MinerConfig(**fields)


def _attr_label(g: AttributedGraph, attrs: tuple[int, ...]) -> str:
    return "|".join(g.attribute_dictionary.token_for(a) for a in attrs)


def _format_delta(delta: float) -> str:
    return "inf" if math.isinf(delta) else f"{delta:.6g}"


def records_text(blocks, g: AttributedGraph, manifest_name: str) -> str:
    lines = [f"# scpm records v{__version__}", f"# manifest: {manifest_name}", RECORDS_HEADER]
    for label, records in blocks:
        if label is not None:
            lines.append(f"# block {label}")
        for rec in records:
            lines.append(
                f"{_attr_label(g, rec.attribute_set)}\t{rec.support}\t{rec.eps:.6f}"
                f"\t{rec.eps_exp.value:.5e}\t{_format_delta(rec.delta)}\t{len(rec.covered)}"
            )
    return "\n".join(lines) + "\n"


def patterns_text(blocks, g: AttributedGraph, manifest_name: str) -> str:
    lines = [f"# scpm patterns v{__version__}", f"# manifest: {manifest_name}", PATTERNS_HEADER]
    for label, patterns in blocks:
        if label is not None:
            lines.append(f"# block {label}")
        for pat in patterns:
            q = pat.quasi_clique
            vertices = ",".join(str(g.original_id(v)) for v in q.vertices)
            lines.append(
                f"{_attr_label(g, pat.attribute_set)}\t{q.size}\t{float(q.density):.2f}\t{vertices}"
            )
    return "\n".join(lines) + "\n"


@dataclass(frozen=True)
class RecordRow:
    attribute_set: tuple[str, ...]
    support: int
    eps: float
    eps_exp: float
    delta: float
    covered_count: int


@dataclass(frozen=True)
class PatternRow:
    attribute_set: tuple[str, ...]
    size: int
    density: float
    vertices: tuple[int, ...]


def parse_records(text: str) -> list[RecordRow]:
    rows = []
    for line in text.splitlines():
        if not line or line.startswith("#"):
            continue
        attrs, support, eps, eps_exp, delta, covered = line.split("\t")
        rows.append(
            RecordRow(
                attribute_set=tuple(attrs.split("|")),
                support=int(support),
                eps=float(eps),
                eps_exp=float(eps_exp),
                delta=math.inf if delta == "inf" else float(delta),
                covered_count=int(covered),
            )
        )
    return rows


def parse_patterns(text: str) -> list[PatternRow]:
    rows = []
    for line in text.splitlines():
        if not line or line.startswith("#"):
            continue
        attrs, size, density, vertices = line.split("\t")
        rows.append(
            PatternRow(
                attribute_set=tuple(attrs.split("|")),
                size=int(size),
                density=float(density),
                vertices=tuple(int(v) for v in vertices.split(",")),
            )
        )
    return rows


def export_pattern_dot(
    pattern: PatternRecord,
    view: GraphView,
    labels: dict[int, object] | None = None,
    title: str | None = None,
) -> str:
    """DOT text with pattern members highlighted and the rest of the view dimmed."""

    def name(v):
        text = str(labels[v]) if labels is not None else str(v)
        return text.replace('"', '\\"')

    member_set = set(pattern.quasi_clique.vertices)
    lines = ["graph pattern {"]
    if title:
        escaped = title.replace('"', '\\"')
        lines.append(f'  label="{escaped}";')
    for v in view.members:
        if v in member_set:
            lines.append(f'  "{name(v)}" [style=filled, fillcolor=gold];')
        else:
            lines.append(f'  "{name(v)}" [color=gray, fontcolor=gray];')
    for i, v in enumerate(view.members):
        for u in view.local_adjacency[i]:
            if u <= v:
                continue
            if u in member_set and v in member_set:
                lines.append(f'  "{name(v)}" -- "{name(u)}" [penwidth=2];')
            else:
                lines.append(f'  "{name(v)}" -- "{name(u)}" [color=gray, style=dotted];')
    lines.append("}")
    return "\n".join(lines) + "\n"


def _sha256(path: str) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(65536), b""):
            h.update(chunk)
    return h.hexdigest()


def make_manifest(args, timings: dict, warnings: dict) -> dict:
    """All resolved configuration, input digests, and per-phase timings."""
    return {
        "tool": "scpm",
        "version": __version__,
        "mode": "naive" if args.baseline else "scpm",
        "config": {
            "graph": args.graph,
            "attributes": args.attributes,
            "sigma_min": args.sigma_min,
            "gamma_min": args.gamma_min,
            "min_size": args.min_size,
            "eps_min": args.eps_min,
            "delta_min": args.delta_min,
            "top_k": args.top_k,
            "strategy": args.strategy,
            "null_model": args.null_model,
            "samples": args.samples,
            "seed": args.seed,
            "baseline": args.baseline,
            "max_set_size": args.max_set_size,
            "threads": args.threads,
            "sweep": args.sweep,
            "out_records": args.out_records,
            "out_patterns": args.out_patterns,
            "export_dot": args.export_dot,
            "fail_fast": args.fail_fast,
            "max_expansions": args.max_expansions,
        },
        "inputs": {
            "graph": {"path": args.graph, "sha256": _sha256(args.graph)},
            "attributes": {"path": args.attributes, "sha256": _sha256(args.attributes)},
        },
        "seed": args.seed,
        "timings": timings,
        "warnings": warnings,
    }


def manifest_to_argv(manifest: dict) -> list[str]:
    """Reconstruct the argv of the run a manifest describes."""
    cfg = manifest["config"]
    argv = [
        "--graph", cfg["graph"],
        "--attributes", cfg["attributes"],
        "--sigma-min", str(cfg["sigma_min"]),
        "--gamma-min", str(cfg["gamma_min"]),
        "--min-size", str(cfg["min_size"]),
        "--eps-min", str(cfg["eps_min"]),
        "--delta-min", str(cfg["delta_min"]),
        "--top-k", str(cfg["top_k"]),
        "--strategy", cfg["strategy"],
        "--null-model", cfg["null_model"],
        "--samples", str(cfg["samples"]),
        "--seed", str(cfg["seed"]),
        "--threads", str(cfg["threads"]),
        "--out-records", cfg["out_records"],
        "--out-patterns", cfg["out_patterns"],
        "--max-expansions", str(cfg["max_expansions"]),
    ]
    if cfg["baseline"]:
        argv.append("--baseline")
    if cfg["max_set_size"] is not None:
        argv.extend(["--max-set-size", str(cfg["max_set_size"])])
    if cfg["sweep"]:
        argv.extend(["--sweep", cfg["sweep"]])
    if cfg["export_dot"]:
        argv.extend(["--export-dot", cfg["export_dot"]])
    if cfg["fail_fast"]:
        argv.append("--fail-fast")
    return argv


def _block_label(param: str, value) -> str:
    if param == "gamma_min":
        return f"gamma_min={float(value):g}"
    return f"{param}={value}"


def _write_dot_exports(out_dir: str, result: MiningResult, g: AttributedGraph):
    directory = Path(out_dir)
    directory.mkdir(parents=True, exist_ok=True)
    index = build_index(g)
    labels = {v: g.original_id(v) for v in range(g.vertex_count)}
    for i, pat in enumerate(result.patterns):
        members = vertex_set(index, pat.attribute_set)
        view = induced_view(g, members)
        title = _attr_label(g, pat.attribute_set)
        text = export_pattern_dot(pat, view, labels=labels, title=title)
        (directory / f"pattern_{i:04d}.dot").write_text(text)


def _run(args) -> int:
    logging.basicConfig(stream=sys.stderr, level=logging.WARNING, format="scpm: %(message)s")
    cfg = _config_from_args(args)
    timings: dict[str, float] = {}

    t0 = time.perf_counter()
    try:
        with open(args.graph) as edge_fh, open(args.attributes) as attr_fh:
            g = load_graph(edge_fh, attr_fh)
    except OSError as exc:
        raise GraphFormatError(str(exc)) from None
    timings["load_s"] = time.perf_counter() - t0
    if g.dropped_self_loops:
        print(f"scpm: dropped {g.dropped_self_loops} self-loop(s)", file=sys.stderr)

    index = build_index(g)
    mine = run_naive if args.baseline else run_scpm

    t0 = time.perf_counter()
    if args.sweep:
        param, values = _parse_sweep(args.sweep)
        record_blocks = []
        pattern_blocks = []
        overflow = 0
        last_result = None
        for value in values:
            result = mine(g, index, _with_value(cfg, param, value))
            label = _block_label(param, value)
            record_blocks.append((label, result.records))
            pattern_blocks.append((label, result.patterns))
            overflow += len(result.stats.overflow_sets)
            last_result = result
        result_for_dot = last_result
        expansions = None
    else:
        result = mine(g, index, cfg)
        record_blocks = [(None, result.records)]
        pattern_blocks = [(None, result.patterns)]
        overflow = len(result.stats.overflow_sets)
        result_for_dot = result
        expansions = result.stats.expansions
    timings["mine_s"] = time.perf_counter() - t0

    t0 = time.perf_counter()
    manifest_name = Path(args.out_records).name + ".manifest.json"
    g_text = records_text(record_blocks, g, manifest_name)
    p_text = patterns_text(pattern_blocks, g, manifest_name)
    Path(args.out_records).parent.mkdir(parents=True, exist_ok=True)
    Path(args.out_patterns).parent.mkdir(parents=True, exist_ok=True)
    Path(args.out_records).write_text(g_text)
    Path(args.out_patterns).write_text(p_text)
    if args.export_dot and result_for_dot is not None:
        _write_dot_exports(args.export_dot, result_for_dot, g)
    timings["write_s"] = time.perf_counter() - t0

    warnings = {"self_loops_dropped": g.dropped_self_loops, "overflow_sets": overflow}
    manifest = make_manifest(args, timings, warnings)
    manifest_path = Path(args.out_records).with_name(manifest_name)
    manifest_path.write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n")

    n_records = sum(len(b) for _, b in record_blocks)
    n_patterns = sum(len(b) for _, b in pattern_blocks)
    note = f", expansions={expansions}" if expansions is not None else ""
    print(
        f"scpm: {n_records} record(s), {n_patterns} pattern(s) "
        f"in {timings['mine_s']:.2f}s{note}",
        file=sys.stderr,
    )
    return 0


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return _run(args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        print(parser.format_usage(), file=sys.stderr, end="")
        return 1
    except GraphFormatError as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return 2
    except SearchBudgetExceeded as exc:
        print(f"resource ceiling: {exc}", file=sys.stderr)
        return 3


def entrypoint():
    sys.exit(main())
