"""Command-line front end.

    modchaos certify  [--config FILE] [--out DIR]
    modchaos witness  [--config FILE] [--seed N] [--out DIR]
    modchaos simulate [--config FILE] [--seed N] [--out DIR] [--svg]
    modchaos example  {1,2,3} [--seed N] [--out DIR] [--svg]

Exit codes: 0 success, 1 failed verdict or missing witness, 2 usage or
configuration error. Every command writes ``report.json`` with the fields
command, seed, config_echo, results and budgets_used.

Config files are JSON. ``structure.kind`` selects a builder:

* ``plus-minus-t``: X(t) = +-t on t = i/100, i = 100..400.
* ``interval-functions``: f_i = t, g_i = -t on [i/10, (i+1)/10);
  optional ``i_start``, ``i_stop`` (inclusive), ``points``.
* ``function-family``: ``functions`` as polynomial coefficient lists
  (``[c0, c1, ...]`` means c0 + c1 t + ...), ``probabilities``, and ``grid``
  either a list of times or ``{"start", "stop", "count"}``.
* ``inline``: ``alphabet`` and ``modules``, each ``{"cells": {prefix: points}}``
  where a prefix is a digit string ("" for the whole set, "12", ...) or a
  comma-separated list, and points are numbers, coordinate lists, or
  ``{"interval": [lo, hi]}``. A missing prefix falls back to its longest
  listed ancestor.
"""

from __future__ import annotations

import argparse
import itertools
import json
import logging
import sys
from pathlib import Path
from typing import Any

import numpy as np

from . import __version__
from .dynamics import (
    ModularPoint,
    check_unpredictability,
    find_sensitivity_witness,
    find_transitivity_witness,
    in_km_neighborhood,
    liyorke_report,
    periodic_point_in_neighborhood,
    validate_sensitivity,
)
from .errors import InvalidArgument, ModChaosError, WitnessNotFound
from .plot import render_svg
from .randproc import (
    MAX_DEPTH,
    RandomProcessSpec,
    TimeGrid,
    emit_path_csv,
    equivalence_report,
    example1_structure,
    example2_structure,
    example3_structure,
    path_rows,
    sample_realization,
)
from .structure import (
    DEFAULT_BUDGET,
    SEPARATION_BUDGET,
    FinitePoints,
    Interval,
    ModularStructure,
    ModuleSpace,
    modular_certificate,
    strong_certificate,
)
from .symseq import (
    TOL,
    FiniteSeq,
    PeriodicSeq,
    make_periodic,
    random_sequence,
    scrambled_pair,
    universal_sequence,
)

log = logging.getLogger("modchaos")

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class ConfigError(ModChaosError):
    pass


def load_config(path: str | None) -> dict:
    if path is None:
        return {}
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    try:
        cfg = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"malformed JSON in {path}: {exc}") from exc
    if not isinstance(cfg, dict):
        raise ConfigError("config must be a JSON object")
    return cfg


def _positive_int(cfg: dict, key: str, default: int) -> int:
    value = cfg.get(key, default)
    if not isinstance(value, int) or isinstance(value, bool) or value < 1:
        raise ConfigError(f"{key} must be a positive integer, got {value!r}")
    return value


def _polynomial(coeffs):
    if not isinstance(coeffs, list) or not coeffs:
        raise ConfigError("each function must be a nonempty list of polynomial coefficients")
    poly = np.polynomial.Polynomial([float(c) for c in coeffs])
    return lambda t: float(poly(t))


def _grid(desc) -> TimeGrid:
    if isinstance(desc, list):
        return TimeGrid.of(desc)
    if isinstance(desc, dict):
        return TimeGrid.of(np.linspace(float(desc["start"]), float(desc["stop"]), int(desc["count"])))
    raise ConfigError("grid must be a list of times or {start, stop, count}")


def _parse_prefix(key: str) -> tuple[int, ...]:
    if key == "":
        return ()
    parts = key.split(",") if "," in key else list(key)
    return tuple(int(p) for p in parts)


def _descriptor(value):
    if isinstance(value, dict) and "interval" in value:
        lo, hi = value["interval"]
        return Interval(float(lo), float(hi))
    if isinstance(value, list) and value:
        return FinitePoints.of(*value)
    raise ConfigError(f"cannot read cell value {value!r}")


def _inline_structure(desc: dict) -> ModularStructure:
    m = desc.get("alphabet", 2)
    modules = desc.get("modules")
    if not isinstance(modules, list) or not modules:
        raise ConfigError("inline structure needs a nonempty modules list")
    tables = []
    for k, mod in enumerate(modules):
        cells = {_parse_prefix(key): _descriptor(v) for key, v in mod.get("cells", {}).items()}
        if () not in cells:
            raise ConfigError(f"module {k + 1} lacks the whole-set cell \"\"")
        tables.append(cells)

    def factory(j):
        if not 1 <= j <= len(tables):
            raise InvalidArgument(f"inline structure has modules 1..{len(tables)}, not {j}")
        table = tables[j - 1]
        depth = max(len(p) for p in table)

        def cell_map(prefix):
            while prefix not in table:
                prefix = prefix[:-1]
            return table[prefix]

        return ModuleSpace(j, m, cell_map, max(depth, MAX_DEPTH), f"inline module {j}")

    return ModularStructure(m, factory, range(1, len(tables) + 1), "inline")


def build(desc: dict | None) -> tuple[RandomProcessSpec | None, ModularStructure, TimeGrid | None]:
    """Structure (and process, when the kind defines one) from a config ``structure`` block."""
    desc = desc or {"kind": "plus-minus-t"}
    kind = desc.get("kind")
    try:
        if kind == "plus-minus-t":
            return example2_structure()
        if kind == "interval-functions":
            i_start = desc.get("i_start", 10)
            i_stop = desc.get("i_stop", 39)
            spec, structure = example3_structure(range(i_start, i_stop + 1), desc.get("points", 101))
            return spec, structure, spec.grid
        if kind == "function-family":
            funcs = [_polynomial(c) for c in desc.get("functions", [[0, 1], [10, 1]])]
            probs = desc.get("probabilities", [1 / len(funcs)] * len(funcs))
            grid = _grid(desc.get("grid", {"start": 0, "stop": 1, "count": 101}))
            spec, structure = example1_structure(funcs, probs, grid)
            return spec, structure, grid
        if kind == "inline":
            return None, _inline_structure(desc), None
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigError(f"bad {kind} structure: {exc}") from exc
    raise ConfigError(f"unknown structure kind {kind!r}")


def _module_range(cfg: dict, structure: ModularStructure) -> range:
    if "modules" not in cfg:
        return structure.module_range
    lo, hi = cfg["modules"]
    if lo < structure.module_range.start or hi >= structure.module_range.stop or lo > hi:
        raise ConfigError(f"modules {lo}..{hi} outside {structure!r}")
    return range(lo, hi + 1)


def _certify(cfg: dict, structure: ModularStructure):
    depth = _positive_int(cfg, "depth", 4)
    degree = _positive_int(cfg, "degree", 1)
    threshold = float(cfg.get("threshold", TOL))
    js = _module_range(cfg, structure)
    cert = modular_certificate(structure, js, depth, degree, threshold)
    strong = None
    if cfg.get("strong"):
        strong = strong_certificate(structure, js, cfg.get("depths", list(range(1, depth + 1))), threshold, degree)
    return cert, strong


def _report(command: str, seed, cfg: dict, results: dict, budgets: dict) -> dict:
    return {"command": command, "seed": seed, "config_echo": cfg, "results": results, "budgets_used": budgets}


def _write(out: Path, name: str, text: str) -> Path:
    out.mkdir(parents=True, exist_ok=True)
    path = out / name
    path.write_text(text)
    return path


def _write_report(out: Path, report: dict) -> Path:
    return _write(out, "report.json", json.dumps(report, indent=2, sort_keys=True) + "\n")


def cmd_certify(cfg: dict, seed: int, out: Path) -> int:
    _, structure, _ = build(cfg.get("structure"))
    cert, strong = _certify(cfg, structure)
    results = {"certificate": cert.to_dict()}
    if strong is not None:
        results["strong_certificate"] = strong.to_dict()
    ok = cert.verdict and (strong is None or strong.verdict)
    results["verdict"] = ok
    budgets = {"depth": len(cert.depths) - 1, "degree": cert.degree, "modules": list(cert.modules),
               "prefix_budget": DEFAULT_BUDGET, "separation_budget": SEPARATION_BUDGET}
    _write_report(out, _report("certify", seed, cfg, results, budgets))
    print(f"certify: verdict={ok} epsilon0={cert.epsilon0:.12g} (module {cert.epsilon0_module})")
    return EXIT_OK if ok else EXIT_FAIL


def _sensitivity(structure, eps0, params, rng, js):
    kappa = float(params.get("kappa", 2.0**-10))
    results, ok = [], True
    for _ in range(_positive_int(params, "points", 10)):
        j = int(rng.integers(js.start, js.stop))
        p = ModularPoint(j, random_sequence(structure.alphabet, int(rng.integers(2**31))))
        try:
            w = find_sensitivity_witness(structure, p, kappa, eps0, degree=params.get("degree", 1))
        except WitnessNotFound as exc:
            results.append({"module": j, "found": False, "reason": str(exc)})
            ok = False
            continue
        valid = validate_sensitivity(structure, w)
        ok &= valid
        results.append({"found": True, "revalidated": valid, **w.to_dict()})
    return ok, {"kappa": kappa, "epsilon0": eps0, "witnesses": results}


def _transitivity(structure, params, rng):
    m = structure.alphabet.m
    horizon = _positive_int(params, "horizon", 100_000)
    targets = params.get("targets")
    if targets is None:
        max_len = _positive_int(params, "max_len", 8)
        targets = [[int(s) for s in rng.integers(1, m + 1, size=int(rng.integers(1, max_len + 1)))]
                   for _ in range(_positive_int(params, "count", 10))]
    source = ModularPoint(1, universal_sequence(structure.alphabet))
    results, ok = [], True
    for target in targets:
        try:
            w = find_transitivity_witness(structure, source, target, horizon)
        except WitnessNotFound as exc:
            results.append({"target": target, "found": False, "reason": str(exc)})
            ok = False
            continue
        valid = w.validate()
        ok &= valid
        results.append({"found": True, "revalidated": valid, **w.to_dict()})
    return ok, {"source": "universal", "horizon": horizon, "witnesses": results}


def _periodic_density(structure, params):
    m = structure.alphabet.m
    l = _positive_int(params, "l", 3)
    offsets = params.get("offsets", [0, 1, 2])
    module = _positive_int(params, "module", max(offsets) + 1)
    passed = total = 0
    for word in itertools.product(range(1, m + 1), repeat=l):
        target = ModularPoint(module, FiniteSeq(structure.alphabet, word))
        for off in offsets:
            q = periodic_point_in_neighborhood(target, l, off)
            total += 1
            passed += in_km_neighborhood(q, target, off, l)
    return passed == total, {"l": l, "module": module, "offsets": offsets, "passed": passed, "total": total}


def _unpredictability(structure, params):
    src = params.get("source", "universal")
    if src == "universal":
        seq = universal_sequence(structure.alphabet)
    elif isinstance(src, dict) and "block" in src:
        seq = make_periodic(src["block"], structure.alphabet, src.get("prefix", ()))
    else:
        raise ConfigError(f"unknown unpredictability source {src!r}")
    horizon = _positive_int(params, "horizon", 100_000)
    w = check_unpredictability(ModularPoint(1, seq), params.get("l", [1, 2, 3, 4]), horizon, structure)
    return w.found, w.to_dict()


def _liyorke(structure, params, js):
    kind = params.get("pair", "scrambled")
    m = structure.alphabet
    if kind == "scrambled":
        a, b = scrambled_pair(m)
    elif kind == "constant":
        a = b = PeriodicSeq(m, (1,))
    else:
        raise ConfigError(f"unknown li-yorke pair {kind!r}")
    horizon = _positive_int(params, "horizon", 10_000)
    start = _positive_int(params, "module", js.start)
    rep = liyorke_report(structure, (ModularPoint(start, a), ModularPoint(start, b)), horizon,
                         float(params.get("kappa", 2.0**-10)), float(params.get("eps", 2.0)),
                         _positive_int(params, "depth", 1))
    need = _positive_int(params, "min_events", 1)
    ok = len(rep.proximal_events) >= need and len(rep.separated_events) >= need
    return ok, rep.to_dict()


WITNESS_KINDS = ("sensitivity", "transitivity", "periodic-density", "unpredictability", "li-yorke")


def cmd_witness(cfg: dict, seed: int, out: Path) -> int:
    _, structure, _ = build(cfg.get("structure"))
    requested = cfg.get("witnesses", {k: {} for k in WITNESS_KINDS})
    if isinstance(requested, list):
        requested = {k: {} for k in requested}
    unknown = set(requested) - set(WITNESS_KINDS)
    if unknown:
        raise ConfigError(f"unknown witness kinds {sorted(unknown)}")
    js = _module_range(cfg, structure)
    rng = np.random.default_rng(seed)
    results, ok_all = {}, True
    eps0 = None
    if "sensitivity" in requested:
        cert, _ = _certify(cfg, structure)
        eps0 = cert.epsilon0
        results["certificate"] = cert.to_dict()
    for kind in WITNESS_KINDS:
        if kind not in requested:
            continue
        params = requested[kind] or {}
        if kind == "sensitivity":
            ok, res = _sensitivity(structure, eps0, params, rng, js)
        elif kind == "transitivity":
            ok, res = _transitivity(structure, params, rng)
        elif kind == "periodic-density":
            ok, res = _periodic_density(structure, params)
        elif kind == "unpredictability":
            ok, res = _unpredictability(structure, params)
        else:
            ok, res = _liyorke(structure, params, js)
        results[kind] = {"ok": ok, **res}
        ok_all &= ok
        print(f"witness {kind}: {'found' if ok else 'NOT FOUND'}")
    results["verdict"] = ok_all
    _write_report(out, _report("witness", seed, cfg, results, {"modules": [js.start, js.stop - 1]}))
    return EXIT_OK if ok_all else EXIT_FAIL


def _emit_paths(out: Path, realization, svg: bool, title: str) -> list[str]:
    files = [_write(out, "path.csv", emit_path_csv(realization, "points")).name]
    files.append(_write(out, "path_step.csv", emit_path_csv(realization, "step")).name)
    if svg:
        files.append(_write(out, "path.svg", render_svg(path_rows(realization, "step"), title)).name)
    return files


def cmd_simulate(cfg: dict, seed: int, out: Path, svg: bool = False) -> int:
    spec, structure, grid = build(cfg.get("structure"))
    if spec is None:
        raise ConfigError("simulate needs a structure kind that defines a random process")
    n_samples = cfg.get("n_samples", 1000)
    if not isinstance(n_samples, int) or n_samples < 0:
        raise ConfigError("n_samples must be a nonnegative integer")
    prefix_len = _positive_int(cfg, "prefix_len", 4)
    budget = _positive_int(cfg, "budget", DEFAULT_BUDGET)
    rep = equivalence_report(spec, structure, n_samples, prefix_len, seed, grid, budget)
    realization = sample_realization(spec, grid, seed)
    files = _emit_paths(out, realization, svg, f"{spec.name}, seed {seed}")
    results = {"equivalence": rep.to_dict(), "files": files}
    budgets = {"n_samples": n_samples, "prefix_len": prefix_len, "budget": budget}
    _write_report(out, _report("simulate", seed, cfg, results, budgets))
    freqs = ", ".join(f"{a}: {f:.4f}" for a, f in rep.frequency_table.items())
    print(f"simulate: valid={rep.valid_prefix_fraction} coverage={rep.coverage}/{rep.possible} freq {{{freqs}}}")
    return EXIT_OK


EXAMPLE_CONFIGS = {
    1: {"kind": "function-family", "functions": [[0, 1], [10, 1]], "probabilities": [0.3, 0.7],
        "grid": {"start": 0, "stop": 1, "count": 101}},
    2: {"kind": "plus-minus-t"},
    3: {"kind": "interval-functions", "i_start": 10, "i_stop": 39, "points": 101},
}


def cmd_example(example_id: int, seed: int, out: Path, svg: bool = False, n_samples: int = 1000,
                prefix_len: int = 4) -> int:
    desc = EXAMPLE_CONFIGS[example_id]
    spec, structure, grid = build(desc)
    cert = modular_certificate(structure, depth=4, degree=1)
    rep = equivalence_report(spec, structure, n_samples, prefix_len, seed, grid)
    realization = sample_realization(spec, grid, seed)
    files = _emit_paths(out, realization, svg, f"Example {example_id}, seed {seed}")
    results = {"certificate": cert.to_dict(), "equivalence": rep.to_dict(), "files": files,
               "grid": {"count": len(grid), "first": grid[0], "last": grid[-1]}}
    cfg = {"example": example_id, "structure": desc}
    budgets = {"depth": 4, "degree": 1, "n_samples": n_samples, "prefix_len": prefix_len}
    _write_report(out, _report("example", seed, cfg, results, budgets))
    print(f"example {example_id}: verdict={cert.verdict} epsilon0={cert.epsilon0:.12g} files={files}")
    return EXIT_OK if cert.verdict else EXIT_FAIL


def make_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="modchaos", description="Modular chaos certificates, witnesses and simulations")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", help="JSON config file")
        p.add_argument("--seed", type=int, default=None, help="top-level seed (default: config seed or 0)")
        p.add_argument("--out", default=".", help="output directory")
        p.add_argument("--svg", action="store_true", help="also write an SVG path render")
        p.add_argument("-v", "--verbose", action="store_true")
        return p

    common(sub.add_parser("certify", help="nesting, diameter and separation certificate"))
    common(sub.add_parser("witness", help="chaos witness searches"))
    common(sub.add_parser("simulate", help="sample realizations and compare with trajectories"))
    ex = common(sub.add_parser("example", help="reproduce one of the built-in examples"))
    ex.add_argument("id", type=int, choices=sorted(EXAMPLE_CONFIGS))
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = make_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else EXIT_OK
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    out = Path(args.out)
    try:
        if args.command == "example":
            seed = 0 if args.seed is None else args.seed
            return cmd_example(args.id, seed, out, args.svg)
        cfg = load_config(args.config)
        seed = args.seed if args.seed is not None else cfg.get("seed", 0)
        if not isinstance(seed, int):
            raise ConfigError(f"seed must be an integer, got {seed!r}")
        if args.command == "certify":
            return cmd_certify(cfg, seed, out)
        if args.command == "witness":
            return cmd_witness(cfg, seed, out)
        return cmd_simulate(cfg, seed, out, args.svg)
    except ModChaosError as exc:
        print(f"modchaos: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
