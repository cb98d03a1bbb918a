"""Command-line surface: JSON reports, CSV coefficient tables, DOT digraphs.

Exit codes: 0 success, 2 usage error, 3 size-guard refusal.  Every JSON
report carries a manifest (command, parameters, version, precision,
timestamp) sufficient to reproduce it; numbers appear as full-precision
decimal strings alongside 64-bit floats and natural logs, since values like
n**n overflow floats long before the analysis stops being exact.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import tempfile
from datetime import datetime, timezone

from . import __version__, bounds, oracle, shortcuts, simulate
from .bounds import Method
from .errors import GuardError, LevelboundError
from .levels import (FUNCTIONS, ProblemSpec, build_digraph, build_kernel,
                     build_partition)
from .numerics import (PRECISION_ENV_VAR, default_precision, log_float,
                       number_triple, to_float)

BENCHMARKS = tuple(f for f in FUNCTIONS if f != "custom")

KERNEL_METHODS = (Method.TYPE0, Method.TYPE1, Method.VISCOSITY_C, Method.VISIT_CL,
                  Method.RECURSIVE_LOWER, Method.RECURSIVE_UPPER,
                  Method.DIGRAPH_PRODUCT_LOWER, Method.RATIO_LOWER,
                  Method.CONDITIONAL_UPPER, Method.RATIO_UPPER)
SUBDIGRAPH_METHODS = (Method.TYPE0, Method.VISCOSITY_C, Method.RECURSIVE_LOWER,
                      Method.DIGRAPH_PRODUCT_LOWER, Method.RATIO_LOWER)


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return args.handler(args)
    except GuardError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except (LevelboundError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="levelbound",
        description="Fitness-level hitting-time bounds for the elitist (1+1) EA")
    sub = parser.add_subparsers(dest="command", required=True)

    pa = sub.add_parser("analyze", help="bounds, shortcuts and oracle for one instance")
    _common(pa)
    pa.add_argument("--methods", default=None,
                    help="comma-separated method list (default: all)")
    pa.add_argument("--subdigraph", choices=["preset", "none"], default="none")
    pa.add_argument("--epsilon", type=float, default=None,
                    help="shortcut threshold (default 1/n)")
    pa.add_argument("--start", default=None,
                    help="start level index or comma-separated distribution "
                         "for the visit-probability coefficients")
    pa.add_argument("--oracle-guard", type=int, default=2000,
                    help="skip the level-chain oracle above this n")
    pa.add_argument("--out", default=None, help="output path (default stdout)")
    pa.set_defaults(handler=cmd_analyze)

    pc = sub.add_parser("coefficients", help="CSV coefficient table for one method")
    _common(pc)
    pc.add_argument("--method", required=True)
    pc.add_argument("--k", type=int, default=None, help="source level (default K)")
    pc.add_argument("--csv", default=None, help="output path (default stdout)")
    pc.set_defaults(handler=cmd_coefficients)

    pd = sub.add_parser("digraph", help="DOT rendering of the level digraph")
    _common(pd)
    pd.add_argument("--subdigraph", choices=["preset", "none"], default="none")
    pd.add_argument("--annotate-shortcuts", action="store_true")
    pd.add_argument("--epsilon", type=float, default=None)
    pd.add_argument("--dot", default=None, help="output path (default stdout)")
    pd.set_defaults(handler=cmd_digraph)

    po = sub.add_parser("oracle", help="exact hitting times")
    _common(po)
    po.add_argument("--mode", choices=["level", "full", "both"], default="both")
    po.add_argument("--rational", action="store_true",
                    help="exact rational arithmetic (full mode: n <= 12)")
    po.add_argument("--out", default=None)
    po.set_defaults(handler=cmd_oracle)

    ps = sub.add_parser("simulate", help="Monte Carlo (1+1) EA runs")
    _common(ps)
    ps.add_argument("--start", type=int, default=None, help="start level (default K)")
    ps.add_argument("--trials", type=int, required=True)
    ps.add_argument("--seed", type=int, required=True)
    ps.add_argument("--max-generations", type=int, default=None)
    ps.add_argument("--engine", choices=["auto", "compiled", "python"], default="auto")
    ps.add_argument("--out", default=None)
    ps.set_defaults(handler=cmd_simulate)

    pv = sub.add_parser("verify-appendix", help="product inequalities and their floors")
    pv.add_argument("--C", type=float, required=True)
    pv.add_argument("--n-list", required=True, help="comma-separated n values")
    pv.add_argument("--precision", type=int, default=None)
    pv.add_argument("--out", default=None)
    pv.set_defaults(handler=cmd_verify_appendix)

    return parser


def _common(p):
    p.add_argument("--function", choices=BENCHMARKS, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--precision", type=int, default=None,
                   help=f"mpfr bits (default 256, or ${PRECISION_ENV_VAR})")


def _manifest(args, **extra) -> dict:
    skip = {"handler", "command"}
    params = {k: v for k, v in sorted(vars(args).items()) if k not in skip}
    m = {
        "command": args.command,
        "arguments": params,
        "tool": "levelbound",
        "version": __version__,
        "precision_bits": getattr(args, "precision", None) or default_precision(),
        "timestamp": datetime.now(timezone.utc).isoformat(),
    }
    m.update(extra)
    return m


def _write_text(path, text: str, manifest: dict | None = None):
    """Atomic write (temp + rename); a manifest lands in a sidecar file.

    Formats with fixed layouts (CSV) cannot embed the manifest, so files get
    a ``<path>.manifest.json`` companion instead.
    """
    if path is None:
        sys.stdout.write(text)
        return
    d = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=d, suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
    if manifest is not None:
        _write_text(path + ".manifest.json",
                    json.dumps(manifest, indent=2, allow_nan=True) + "\n")


def _write_json(path, payload: dict):
    _write_text(path, json.dumps(payload, indent=2, allow_nan=True) + "\n")


def _triple(x):
    return None if x is None else number_triple(x)


def _oracle_json(res: oracle.OracleResult) -> dict:
    out = {
        "mode": res.mode,
        "m": [_triple(v) for v in res.m],
        "notes": list(res.notes),
    }
    if res.lumpability_deviation is not None:
        out["lumpability_deviation"] = res.lumpability_deviation
    return out


def _bound_json(report: bounds.BoundReport) -> dict:
    return {
        "method": report.method.value,
        "direction": report.direction,
        "d": [_triple(v) for v in report.d],
        "coefficient_min": _triple(report.coefficient_min),
    }


def _parse_methods(raw, function):
    if raw is None:
        methods = list(KERNEL_METHODS)
        if function in BENCHMARKS:
            methods.append(Method.PAPER_ANALYTIC)
        return methods
    out = []
    for name in raw.split(","):
        name = name.strip()
        try:
            out.append(Method(name))
        except ValueError:
            raise ValueError(f"unknown method {name!r}; choices: "
                             + ", ".join(m.value for m in Method))
    return out


def _kernel_coefficients(kernel, method, start=None):
    if method is Method.TYPE0:
        return bounds.coeff_constant(kernel, 0)
    if method is Method.TYPE1:
        return bounds.coeff_constant(kernel, 1)
    if method is Method.VISCOSITY_C:
        return bounds.coeff_viscosity(kernel)
    if method is Method.VISIT_CL:
        return bounds.coeff_visit_probability(kernel, start)
    if method is Method.RECURSIVE_LOWER:
        return bounds.coeff_recursive(kernel, "lower")
    if method is Method.RECURSIVE_UPPER:
        return bounds.coeff_recursive(kernel, "upper")
    if method is Method.DIGRAPH_PRODUCT_LOWER:
        return bounds.coeff_digraph_product(kernel)
    if method is Method.CONDITIONAL_UPPER:
        return bounds.coeff_conditional_upper(kernel)
    if method is Method.RATIO_LOWER:
        return bounds.coeff_ratio(bounds.KernelProvider(kernel), "lower")
    if method is Method.RATIO_UPPER:
        return bounds.coeff_ratio(bounds.KernelProvider(kernel), "upper")
    raise ValueError(f"method {method.value} has no kernel-exact coefficient table")


def _parse_start(raw, K):
    if raw is None:
        return None
    if "," not in raw:
        level = int(raw)
        if not 0 <= level <= K:
            raise ValueError(f"start level {level} does not exist (K={K})")
        return tuple(1 if k == level else 0 for k in range(K + 1))
    vals = tuple(float(v) for v in raw.split(","))
    return vals


def cmd_analyze(args) -> int:
    spec = ProblemSpec(args.function, args.n)
    methods = _parse_methods(args.methods, args.function)
    partition = build_partition(spec)
    kernel = build_kernel(spec, partition, precision=args.precision)
    start = _parse_start(args.start, kernel.K)

    report = {
        "manifest": _manifest(args),
        "function": args.function,
        "n": args.n,
        "partition": {
            "kind": partition.kind,
            "K": partition.K,
            "levels": [{"k": k, "weights": list(lv.weights),
                        "fitness": None if lv.fitness is None else str(lv.fitness)}
                       for k, lv in enumerate(partition.levels)],
            "warnings": list(partition.warnings),
        },
        "notes": [],
    }

    sc = shortcuts.detect_shortcuts(kernel, args.epsilon)
    report["shortcuts"] = _shortcut_json(sc)

    if args.n <= args.oracle_guard:
        level_oracle = oracle.exact_level_hitting(kernel)
        report["oracle"] = _oracle_json(level_oracle)
    else:
        level_oracle = None
        report["oracle"] = None
        report["notes"].append(f"oracle skipped: n={args.n} above guard {args.oracle_guard}")

    report["bounds"] = []
    for method in methods:
        if method is Method.PAPER_ANALYTIC:
            if args.function in ("twomax1", "deceptive"):
                continue  # printed bounds live on the preset sub-digraph
            br = bounds.paper_analytic_bound(args.function, args.n, args.precision)
            report["bounds"].append(_bound_json(br))
            provider = bounds.paper_analytic_provider(args.function, args.n,
                                                      args.precision)
            for note in bounds.provider_discrepancies(provider, kernel):
                report["notes"].append(f"paper-analytic: {note}")
            continue
        table = _kernel_coefficients(kernel, method, start)
        br = bounds.assemble_bound(kernel, table, bounds.method_direction(method))
        report["bounds"].append(_bound_json(br))

    if args.subdigraph == "preset":
        report["subdigraph"] = _analyze_subdigraph(spec, args, level_oracle)
    else:
        report["subdigraph"] = None

    _write_json(args.out, report)
    return 0


def _shortcut_json(sc: shortcuts.ShortcutReport) -> dict:
    return {
        "epsilon": _triple(sc.epsilon),
        "classification": sc.classification,
        "weak": [{"k": p.k, "l": p.l, "ratio": _triple(p.ratio)} for p in sc.weak],
        "strong": [{"k": p.k, "l": p.l, "ratio": _triple(p.ratio)} for p in sc.strong],
    }


def _analyze_subdigraph(spec, args, full_oracle) -> dict:
    subset = shortcuts.preset_subset(args.function, args.n)
    partition, kernel = shortcuts.build_subdigraph(spec, subset,
                                                   precision=args.precision)
    sub_oracle = oracle.exact_level_hitting(kernel)
    out = {
        "preset_weights": list(subset.weights),
        "K": kernel.K,
        "warnings": list(partition.warnings),
        "index_monotone": kernel.index_monotone,
        "oracle": _oracle_json(sub_oracle),
        "bounds": [],
        "findings": [],
    }
    for method in SUBDIGRAPH_METHODS:
        table = _kernel_coefficients(kernel, method)
        br = bounds.assemble_bound(kernel, table, "lower")
        out["bounds"].append(_bound_json(br))
        for k in range(1, kernel.K + 1):
            d, m = br.d[k], sub_oracle.m[k]
            if d is not None and m is not None and to_float(d) > to_float(m) * (1 + 1e-9):
                out["findings"].append(
                    f"{method.value}: d'_{k} = {to_float(d):.6g} exceeds m'_{k} = "
                    f"{to_float(m):.6g}; the preset level ordering is not "
                    "fitness-descending, so the bound is not valid at this level")
    if full_oracle is not None:
        level_of = build_partition(spec).level_of_weight()
        out["retained_full_levels"] = [level_of[w] for w in subset.weights]
        out["m_full_at_retained"] = [
            _triple(full_oracle.m[level_of[w]]) for w in subset.weights]
    if args.function in ("twomax1", "deceptive"):
        provider = bounds.paper_analytic_provider(args.function, args.n, args.precision)
        out["paper_bound"] = _bound_json(
            bounds.paper_analytic_bound(args.function, args.n, args.precision))
        out["paper_discrepancies"] = list(bounds.provider_discrepancies(provider, kernel))
    return out


def cmd_coefficients(args) -> int:
    spec = ProblemSpec(args.function, args.n)
    if args.method == Method.PAPER_ANALYTIC.value:
        provider = bounds.paper_analytic_provider(args.function, args.n, args.precision)
        K = provider.K
        k = args.k if args.k is not None else K
        if k != K:
            raise ValueError("the printed coefficient table is only defined at k = K")
        values = {(K, l): bounds.printed_coefficient(provider, l) for l in range(1, K)}
        method = Method.PAPER_ANALYTIC
    else:
        try:
            method = Method(args.method)
        except ValueError:
            raise ValueError(f"unknown method {args.method!r}; choices: "
                             + ", ".join(m.value for m in Method))
        kernel = build_kernel(spec, precision=args.precision)
        k = args.k if args.k is not None else kernel.K
        if not 1 <= k <= kernel.K:
            raise ValueError(f"k must be in [1, {kernel.K}]")
        table = _kernel_coefficients(kernel, method)
        values = {(k, l): table.get(k, l) for l in range(1, k)}
    lines = ["k,ell,method,value,log_value"]
    for l in range(1, k):
        v = values[(k, l)]
        lines.append(f"{k},{l},{method.value},{to_float(v):.17g},{log_float(v):.17g}")
    _write_text(args.csv, "\n".join(lines) + "\n", manifest=_manifest(args))
    return 0


def cmd_digraph(args) -> int:
    spec = ProblemSpec(args.function, args.n)
    prime = ""
    if args.subdigraph == "preset":
        subset = shortcuts.preset_subset(args.function, args.n)
        partition, kernel = shortcuts.build_subdigraph(spec, subset,
                                                       precision=args.precision)
        prime = "'"
    else:
        partition = build_partition(spec)
        kernel = build_kernel(spec, partition, precision=args.precision)
    digraph = build_digraph(kernel)
    red_arcs = set()
    if args.annotate_shortcuts:
        sc = shortcuts.detect_shortcuts(kernel, args.epsilon)
        deepest = {}
        for p in (*sc.weak, *sc.strong):
            deepest[p.k] = max(deepest.get(p.k, 0), p.l)
        for (k, l) in digraph.arcs:
            if k in deepest and l <= deepest[k] - 1:
                red_arcs.add((k, l))
    manifest = _manifest(args)
    lines = ["digraph levels {",
             f"  // manifest: {json.dumps(manifest)}",
             "  rankdir=LR;"]
    for k, lv in enumerate(partition.levels):
        ws = ",".join(str(w) for w in lv.weights) if len(lv.weights) <= 4 else "other"
        f = str(lv.fitness) if lv.fitness is not None else "-"
        lines.append(f'  n{k} [label="S{prime}_{k} [w={ws}, f={f}]"];')
    for (k, l) in digraph.arcs:
        p = to_float(digraph.probability[(k, l)])
        attrs = f'label="{p:.2e}"'
        if (k, l) in red_arcs:
            attrs += ", color=red"
        lines.append(f"  n{k} -> n{l} [{attrs}];")
    lines.append("}")
    _write_text(args.dot, "\n".join(lines) + "\n")
    return 0


def cmd_oracle(args) -> int:
    spec = ProblemSpec(args.function, args.n)
    payload = {"manifest": _manifest(args), "function": args.function, "n": args.n}
    mode = args.mode
    kernel_mode = "exact" if args.rational else "mpfr"
    if mode in ("level", "both"):
        kernel = build_kernel(spec, mode=kernel_mode, precision=args.precision)
        payload["level_chain"] = _oracle_json(oracle.exact_level_hitting(kernel))
    if mode in ("full", "both"):
        res = oracle.exact_full_hitting(spec, rational=args.rational)
        payload["full_state"] = _oracle_json(res)
    if mode == "both":
        gaps = []
        a = payload["level_chain"]["m"]
        b = payload["full_state"]["m"]
        for va, vb in zip(a, b):
            if va is None or vb is None:
                continue
            fa, fb = va["float"], vb["float"]
            if fb:
                gaps.append(abs(fa - fb) / abs(fb))
        payload["max_relative_gap"] = max(gaps) if gaps else 0.0
    _write_json(args.out, payload)
    return 0


def cmd_simulate(args) -> int:
    spec = ProblemSpec(args.function, args.n)
    partition = build_partition(spec)
    start = args.start if args.start is not None else partition.K
    config = simulate.SimulationConfig(spec, start, args.trials, args.seed,
                                       args.max_generations, args.engine)
    result = simulate.run_trials(config)
    payload = {
        "manifest": _manifest(args, seed=args.seed),
        "function": args.function,
        "n": args.n,
        "start_level": start,
        "trials": args.trials,
        "max_generations": config.generation_cap(),
        "engine": result.engine,
        "generator": result.generator,
        "mean": result.mean,
        "std": result.std,
        "stderr": result.stderr,
        "censored_fraction": result.censored_fraction,
        "unreliable": result.unreliable,
        "visit_frequency": [float(v) for v in result.visit_frequency],
    }
    _write_json(args.out, payload)
    return 0


def cmd_verify_appendix(args) -> int:
    ns = [int(v) for v in args.n_list.split(",")]
    results = []
    all_pass = True
    for n in ns:
        ap = bounds.appendix_products(args.C, n, args.precision)
        entry = {
            "n": n,
            "product1": _triple(ap.product1),
            "floor1": _triple(ap.floor1),
            "product1_ok": ap.ok1,
            "product2": _triple(ap.product2),
            "floor2": _triple(ap.floor2),
            "product2_ok": ap.ok2,
        }
        results.append(entry)
        for ok in (ap.ok1, ap.ok2):
            if ok is False:
                all_pass = False
    payload = {"manifest": _manifest(args), "C": args.C, "results": results,
               "all_pass": all_pass}
    _write_json(args.out, payload)
    return 0


if __name__ == "__main__":
    sys.exit(main())
