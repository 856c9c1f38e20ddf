"""Command-line front end: `gsr run`, `gsr design`, `gsr check`."""

from __future__ import annotations

import argparse
import sys
from typing import Optional

import numpy as np

from .analysis import (
    check_corollary1,
    check_lemma1,
    check_theorem1,
    decompose_error,
    optimal_w0,
    theorem_quantities,
)
from .design import (
    Bounds,
    DesignProblem,
    ExactSignal,
    SdpSolverConfig,
    design_minmax_prony,
    design_minmax_sdr,
    design_prony,
    design_sdr,
)
from .errors import ConfigError, GsrError
from .experiments import parse_config, run_experiment, emit_csv
from .graphs import Adaptive, Invariant, laplacian, parse_edgelist
from .signals import NoiseModel, SignalBounds

_DESIGN_METHODS = {
    "prony": design_prony,
    "sdr": design_sdr,
    "minmax-prony": design_minmax_prony,
    "minmax-sdr": design_minmax_sdr,
}

_PRIOR_KEYS = ("signal", "lower", "upper", "noise_sigma2", "w0_star", "snr_db")


def _read(path: str) -> str:
    with open(path, "r", encoding="utf-8") as fh:
        return fh.read()


def parse_prior(text: str) -> dict:
    """Parse a design prior file (`key = value`, '#' comments).

    Recognized keys: signal, lower, upper (comma-separated floats),
    noise_sigma2, w0_star, snr_db (floats). Unknown keys are hard errors.
    """
    out: dict = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        key, sep, value = line.partition("=")
        key, value = key.strip(), value.strip()
        if not sep or not key:
            raise ConfigError(f"line {lineno}: expected key = value, got {raw!r}")
        if key not in _PRIOR_KEYS:
            raise ConfigError(f"line {lineno}: unknown prior key {key!r}")
        if key in out:
            raise ConfigError(f"line {lineno}: repeated prior key {key!r}")
        try:
            if key in ("signal", "lower", "upper"):
                out[key] = np.array([float(v) for v in value.split(",")])
            else:
                out[key] = float(value)
        except ValueError as exc:
            raise ConfigError(f"line {lineno}: bad value for {key!r}") from exc
    return out


def _cmd_run(args: argparse.Namespace) -> int:
    cfg = parse_config(_read(args.config))
    table = run_experiment(cfg, data_path=args.data)
    emit_csv(table, args.out)
    print(f"wrote {len(table.rows)} rows to {args.out}")
    return 0


def _design_problem(args: argparse.Namespace) -> DesignProblem:
    graph = parse_edgelist(_read(args.graph))
    lap = laplacian(graph)
    prior = parse_prior(_read(args.prior))
    n = graph.n_nodes

    for key in ("signal", "lower", "upper"):
        if key in prior and prior[key].shape != (n,):
            raise ConfigError(f"prior {key} has {prior[key].size} entries, graph has {n} nodes")

    if "w0_star" in prior:
        w0 = prior["w0_star"]
    elif "snr_db" in prior:
        w0 = optimal_w0(lap, prior["snr_db"], args.w0_multiplier)
    else:
        raise ConfigError("prior must set w0_star or snr_db")

    if args.method in ("prony", "sdr"):
        if "signal" not in prior:
            raise ConfigError(f"method {args.method} needs a signal prior")
        prior_obj = ExactSignal(x=prior["signal"])
    else:
        if "lower" not in prior or "upper" not in prior:
            raise ConfigError(f"method {args.method} needs lower and upper bounds")
        prior_obj = Bounds(bounds=SignalBounds(x_l=prior["lower"], x_u=prior["upper"]))

    noise: Optional[NoiseModel] = None
    if "noise_sigma2" in prior:
        noise = NoiseModel.isotropic(prior["noise_sigma2"], n)
    elif args.method in ("sdr", "minmax-sdr"):
        raise ConfigError(f"method {args.method} needs noise_sigma2 in the prior")

    return DesignProblem(lap=lap, prior=prior_obj, w0_star=w0, noise=noise)


def _cmd_design(args: argparse.Namespace) -> int:
    problem = _design_problem(args)
    cfg = SdpSolverConfig(tolerance=args.tolerance, backend=args.backend)
    result = _DESIGN_METHODS[args.method](problem, cfg)
    record = result.to_record()
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(record + "\n")
        print(f"wrote design record to {args.out}")
    else:
        print(record)
    return 0


def _verdict(name: str, ok: Optional[bool], detail: str = "") -> tuple[str, Optional[bool]]:
    if ok is None:
        label = "NOT EVALUATED"
    else:
        label = "SATISFIED" if ok else "VIOLATED"
    suffix = f" ({detail})" if detail else ""
    return f"{name}: {label}{suffix}", ok


def _cmd_check(args: argparse.Namespace) -> int:
    graph = parse_edgelist(_read(args.graph))
    lap = laplacian(graph)
    try:
        w = np.array([float(v) for v in args.omega.split(",")])
    except ValueError as exc:
        raise ConfigError("omega must be a comma-separated list of floats") from exc
    if w.shape != (graph.n_nodes,):
        raise ConfigError(f"omega has {w.size} entries, graph has {graph.n_nodes} nodes")
    weights = Adaptive(w=w)

    prior = parse_prior(_read(args.prior)) if args.prior else {}
    have_stats = "signal" in prior and "noise_sigma2" in prior

    lines = []
    ok_all = True

    line, ok = _verdict("lemma1", check_lemma1(args.w0, w), f"w0={args.w0:g}")
    lines.append(line)
    ok_all &= ok

    if have_stats:
        x = prior["signal"]
        if x.shape != (graph.n_nodes,):
            raise ConfigError("prior signal length does not match the graph")
        noise = NoiseModel.isotropic(prior["noise_sigma2"], graph.n_nodes)
        tq = theorem_quantities(x, noise, lap)
        line, ok = _verdict(
            "theorem1",
            check_theorem1(args.w0, w, tq),
            f"rho={tq.rho:.6g} gamma={tq.gamma:.6g}",
        )
        lines.append(line)
        ok_all &= ok
        line, ok = _verdict("corollary1", check_corollary1(w, tq))
        lines.append(line)
        ok_all &= ok
        na = decompose_error(lap, weights, x, noise)
        ni = decompose_error(lap, Invariant(w0=args.w0), x, noise)
        dominated = na.variance <= ni.variance
        line, ok = _verdict(
            "variance",
            dominated,
            f"adaptive={na.variance:.6g} invariant={ni.variance:.6g}",
        )
        lines.append(line)
        ok_all &= ok
    else:
        lines.append(_verdict("theorem1", None, "no signal/noise prior")[0])
        lines.append(_verdict("corollary1", None, "no signal/noise prior")[0])

    print("\n".join(lines))
    return 0 if ok_all else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gsr", description="Graph-signal recovery with node-adaptive regularization."
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run an experiment from a config file")
    p_run.add_argument("--config", required=True, help="experiment config file")
    p_run.add_argument("--data", default=None, help="station CSV (dataset experiments)")
    p_run.add_argument("--out", required=True, help="output CSV path")
    p_run.set_defaults(func=_cmd_run)

    p_design = sub.add_parser("design", help="design node weights for a graph")
    p_design.add_argument("--graph", required=True, help="edge-list file")
    p_design.add_argument("--prior", required=True, help="prior file")
    p_design.add_argument("--method", required=True, choices=sorted(_DESIGN_METHODS))
    p_design.add_argument("--out", default=None, help="record file (default: stdout)")
    p_design.add_argument("--w0-multiplier", type=float, default=1.0, dest="w0_multiplier")
    p_design.add_argument("--backend", default="interior-point", help="SDP solver backend")
    p_design.add_argument("--tolerance", type=float, default=1e-7, help="SDP tolerance")
    p_design.set_defaults(func=_cmd_design)

    p_check = sub.add_parser("check", help="check weight-dominance conditions")
    p_check.add_argument("--graph", required=True, help="edge-list file")
    p_check.add_argument("--w0", required=True, type=float, help="invariant weight")
    p_check.add_argument("--omega", required=True, help="comma-separated node weights")
    p_check.add_argument("--prior", default=None, help="prior file with signal/noise_sigma2")
    p_check.set_defaults(func=_cmd_check)

    return parser


def main(argv: Optional[list[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (GsrError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
