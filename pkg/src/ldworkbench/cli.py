"""Command-line front end: ``ldworkbench <command> [options]``.

Reports go to standard output, diagnostics to standard error. Exit status is
0 on success, 2 for invalid input, 3 when an exact enumeration would exceed
the cap and 4 when a numerical routine fails to converge.
"""
from __future__ import annotations

import argparse
import math
import re
import sys
from typing import Callable

from . import entropies, divergences, estimation, fisher, fluctuation, hypothesis, ldp
from . import empirical_sanov, typical_coding
from .errors import EnumerationCapExceeded, InvalidInput, NonConvergence
from .io import (
    csv_report,
    json_report,
    load_json,
    parse_constraint,
    parse_family,
    parse_grid,
    parse_int_grid,
    parse_involution,
    parse_measure,
    parse_rv,
    parse_sample,
    rows_to_json,
)
from .measures import DEFAULT_CAP

EXIT_INPUT, EXIT_CAP, EXIT_NONCONVERGENCE = 2, 3, 4


def _emit(args, command: str, header, rows) -> str:
    if args.format == "json":
        return rows_to_json(command, header, rows)
    return csv_report(header, rows)


def _emit_dict(args, command: str, payload: dict) -> str:
    if args.format == "csv":
        flat = {k: v for k, v in payload.items() if not isinstance(v, (dict, list))}
        return csv_report(list(flat), [list(flat.values())])
    return json_report(command, payload)


def cmd_entropy(args) -> str:
    p = parse_measure(load_json(args.measure))
    alphas = parse_grid(args.alpha) if args.alpha else []
    return _emit_dict(args, "entropy", entropies.entropy_report(p, alphas).to_dict(args.bits))


def cmd_divergence(args) -> str:
    p = parse_measure(load_json(args.p))
    q = parse_measure(load_json(args.q))
    alphas = parse_grid(args.alpha) if args.alpha else []
    return _emit_dict(args, "divergence", divergences.divergence_report(p, q, alphas).to_dict())


def _model(args) -> ldp.CgfModel:
    p = parse_measure(load_json(args.measure))
    x = parse_rv(load_json(args.rv), p.space)
    return ldp.CgfModel(p, x)


def cmd_rate(args) -> str:
    model = _model(args)
    rows = []
    for theta in parse_grid(args.theta_grid):
        rate = model.rate(theta)
        if model.m < theta < model.M and not model.degenerate:
            alpha = model.solve_alpha(theta)
            c = model.cgf(alpha)
        else:
            alpha = math.nan
            c = math.nan
        rows.append((theta, alpha, rate, c))
    return _emit(args, "rate", ["theta", "alpha", "I", "C"], rows)


def cmd_cramer(args) -> str:
    model = _model(args)
    log_p = ldp.cramer_exact_log(model, args.N, args.a, args.b, args.cap)
    payload = {
        "N": args.N, "a": args.a, "b": args.b,
        "probability": math.exp(log_p),
        "exponent": log_p / args.N,
        "rate_infimum": ldp.RateFunction(model).interval_infimum(args.a, args.b),
    }
    if args.mc:
        payload["mc_frequency"] = ldp.cramer_mc(model, args.N, args.a, args.b, args.mc, args.seed)
        payload["mc_reps"] = args.mc
        payload["seed"] = args.seed
    return _emit_dict(args, "cramer", payload)


def cmd_coding(args) -> str:
    p = parse_measure(load_json(args.measure))
    payload = typical_coding.covering_exponent(p, args.N, args.gamma, args.cap).to_dict()
    if args.eps is not None:
        payload["source_coding_bits"] = typical_coding.source_coding_optimum(p, args.N, args.eps,
                                                                             args.cap)
    return _emit_dict(args, "coding", payload)


def cmd_testing(args) -> str:
    p = parse_measure(load_json(args.p))
    q = parse_measure(load_json(args.q))
    if args.swap:
        p, q = q, p
    mode = args.mode
    if mode == "chernoff":
        alpha, value = hypothesis.chernoff_exponent(p, q)
        return _emit_dict(args, "testing", {"mode": mode, "alpha_min": alpha, "value": value})
    if mode == "bayes":
        Ns = parse_int_grid(args.N) if args.N else [1]
        _, value = hypothesis.chernoff_exponent(p, q)
        rows = [(n, hypothesis.bayes_error_log_exact(p, q, args.prior, n, args.cap) / n, value)
                for n in Ns]
        return _emit(args, "testing", ["N", "log_error_over_N", "chernoff"], rows)
    if mode == "stein":
        Ns = parse_int_grid(args.N) if args.N else [1]
        limit = -divergences.kl_divergence(p, q)
        rows = []
        for n in Ns:
            s, e = hypothesis.stein_exponent(p, q, args.gamma, n, args.cap)
            rows.append((n, s, e, limit))
        return _emit(args, "testing", ["N", "s_N", "exponent", "limit"], rows)
    pair = hypothesis.TiltedPair(p, q)
    if args.theta_grid:
        rows = [(t, hypothesis.hoeffding_phi(pair, None, t), hypothesis.phi_hat(pair, None, t))
                for t in parse_grid(args.theta_grid)]
        return _emit(args, "testing", ["theta", "phi", "phi_hat"], rows)
    s_grid = parse_grid(args.s_grid) if args.s_grid else [0.0]
    rows = [(s, *hypothesis.hoeffding_psi(pair, None, s)) for s in s_grid]
    return _emit(args, "testing", ["s", "psi", "alpha_star"], rows)


def cmd_fluctuation(args) -> str:
    p = parse_measure(load_json(args.measure))
    theta = parse_involution(load_json(args.involution))
    dist = fluctuation.ep_distribution(p, theta)
    return _emit_dict(args, "fluctuation", {"atoms": dist.to_dict(),
                                            "max_violation": fluctuation.fluctuation_check(dist)})


def cmd_sanov(args) -> str:
    p = parse_measure(load_json(args.measure))
    gamma = parse_constraint(load_json(args.constraint))
    report = empirical_sanov.sanov_experiment(p, gamma, parse_int_grid(args.N_grid), cap=args.cap)
    rows = [(n, e, g, report.limit) for n, e, g in report.rows]
    return _emit(args, "sanov", ["N", "exponent", "gap", "limit"], rows)


def cmd_fisher(args) -> str:
    fam = parse_family(load_json(args.family))
    rows = fisher.energy_profile(fam, parse_grid(args.theta_grid))
    return _emit(args, "fisher", ["theta", "info", "energy"], rows)


def cmd_geodesic(args) -> str:
    p = parse_measure(load_json(args.p))
    q = parse_measure(load_json(args.q))
    return _emit_dict(args, "geodesic", {"distance": fisher.geodesic_distance(p, q)})


def cmd_mle(args) -> str:
    fam = parse_family(load_json(args.family))
    sample = parse_sample(load_json(args.sample), fam.space)
    return _emit_dict(args, "mle", estimation.mle(fam, sample, args.grid_points).to_dict())


def cmd_efficiency(args) -> str:
    fam = parse_family(load_json(args.family))
    rows = estimation.efficiency_experiment(fam, parse_grid(args.theta), parse_int_grid(args.N_grid),
                                            args.reps, args.seed, args.grid_points)
    header = ["theta", "N", "reps", "n_risk", "n_risk_se", "mean_abs_error", "inverse_fisher"]
    return _emit(args, "efficiency", header, [[getattr(r, h) for h in header] for r in rows])


def _seed(text: str) -> int:
    v = int(text)
    if not 0 <= v < 2**64:
        raise argparse.ArgumentTypeError("seed must be a 64-bit unsigned integer")
    return v


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=_seed, default=0, help="master seed (default 0)")
    common.add_argument("--cap", type=int, default=DEFAULT_CAP,
                        help="largest number of type classes to enumerate")
    common.add_argument("--format", choices=("json", "csv"), default=None)

    parser = argparse.ArgumentParser(prog="ldworkbench",
                                     description="Entropy and large-deviation workbench.")
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name: str, fn: Callable, default_format: str, help: str) -> argparse.ArgumentParser:
        sp = sub.add_parser(name, parents=[common], help=help)
        sp.set_defaults(func=fn, default_format=default_format)
        return sp

    sp = add("entropy", cmd_entropy, "json", "Shannon, Hartley and Renyi entropies")
    sp.add_argument("--measure", required=True)
    sp.add_argument("--alpha")
    sp.add_argument("--bits", action="store_true")

    sp = add("divergence", cmd_divergence, "json", "relative and Jensen-Shannon entropies")
    sp.add_argument("--p", required=True)
    sp.add_argument("--q", required=True)
    sp.add_argument("--alpha")

    sp = add("rate", cmd_rate, "csv", "rate function on a theta grid")
    sp.add_argument("--measure", required=True)
    sp.add_argument("--rv", required=True)
    sp.add_argument("--theta-grid", required=True)

    sp = add("cramer", cmd_cramer, "json", "exact and Monte Carlo sample-mean probabilities")
    sp.add_argument("--measure", required=True)
    sp.add_argument("--rv", required=True)
    sp.add_argument("--N", type=int, required=True)
    sp.add_argument("--a", type=float, required=True)
    sp.add_argument("--b", type=float, default=math.inf)
    sp.add_argument("--mc", type=int, default=0, help="number of Monte Carlo replicas")

    sp = add("coding", cmd_coding, "json", "covering numbers and source coding")
    sp.add_argument("--measure", required=True)
    sp.add_argument("--N", type=int, required=True)
    sp.add_argument("--gamma", type=float, default=0.5)
    sp.add_argument("--eps", type=float)

    sp = add("testing", cmd_testing, "csv", "hypothesis-testing exponents")
    sp.add_argument("--p", required=True)
    sp.add_argument("--q", required=True)
    sp.add_argument("--mode", choices=("bayes", "stein", "chernoff", "hoeffding"), required=True)
    sp.add_argument("--gamma", type=float, default=0.5)
    sp.add_argument("--prior", type=float, default=0.5)
    sp.add_argument("--s-grid")
    sp.add_argument("--theta-grid")
    sp.add_argument("--N")
    sp.add_argument("--swap", action="store_true", help="exchange the roles of P and Q")

    sp = add("fluctuation", cmd_fluctuation, "json", "entropy-production distribution")
    sp.add_argument("--measure", required=True)
    sp.add_argument("--involution", required=True)

    sp = add("sanov", cmd_sanov, "csv", "exact empirical-measure exponents")
    sp.add_argument("--measure", required=True)
    sp.add_argument("--constraint", required=True)
    sp.add_argument("--N-grid", required=True)

    sp = add("fisher", cmd_fisher, "csv", "Fisher information and path energy")
    sp.add_argument("--family", required=True)
    sp.add_argument("--theta-grid", required=True)

    sp = add("geodesic", cmd_geodesic, "json", "Fisher-Rao geodesic distance")
    sp.add_argument("--p", required=True)
    sp.add_argument("--q", required=True)

    sp = add("mle", cmd_mle, "json", "maximum-likelihood estimate")
    sp.add_argument("--family", required=True)
    sp.add_argument("--sample", required=True)
    sp.add_argument("--grid-points", type=int, default=512)

    sp = add("efficiency", cmd_efficiency, "csv", "Monte Carlo MLE risk")
    sp.add_argument("--family", required=True)
    sp.add_argument("--theta", required=True)
    sp.add_argument("--N-grid", required=True)
    sp.add_argument("--reps", type=int, default=1000)
    sp.add_argument("--grid-points", type=int, default=512)
    return parser


def _attach_negative_values(argv: list[str]) -> list[str]:
    """Join ``--flag -0.9:0.9:0.1`` into ``--flag=-0.9:0.9:0.1``.

    argparse would otherwise read a grid starting with a minus sign as an option.
    """
    out: list[str] = []
    i = 0
    while i < len(argv):
        tok = argv[i]
        nxt = argv[i + 1] if i + 1 < len(argv) else ""
        if tok.startswith("--") and "=" not in tok and re.match(r"-[\d.]", nxt):
            out.append(f"{tok}={nxt}")
            i += 2
        else:
            out.append(tok)
            i += 1
    return out


def main(argv: list[str] | None = None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    args = build_parser().parse_args(_attach_negative_values(argv))
    if args.format is None:
        args.format = args.default_format
    try:
        out = args.func(args)
    except EnumerationCapExceeded as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CAP
    except NonConvergence as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NONCONVERGENCE
    except (InvalidInput, ValueError, KeyError, TypeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    sys.stdout.write(out)
    return 0


if __name__ == "__main__":
    sys.exit(main())
