"""Command-line front end.

Verbs: gen, kernel, monopole, gaussgreen, transience, walk, resistance,
report.  Results are JSON (verdicts, reports) or CSV (per-stage traces);
every artifact embeds the fully resolved configuration, including the seed,
tolerances and exhaustion plan, so runs are auditable and reproducible.

Exit codes: 0 success, 2 precondition or domain errors (bad input, unknown
model, malformed JSON), 3 numerical non-convergence (the trace is still
written).
"""

from __future__ import annotations

import argparse
import ast
import os
import sys

from . import __version__
from .errors import ConfigurationError, NumericalError, ResnetError
from .gaussgreen import LIMIT_TOL, VERDICT_INCONCLUSIVE, gauss_green
from .kernels import (ENERGY_CAUCHY_TOL, KIND_DIPOLE, KIND_FIN, KIND_HARM,
                      POINTWISE_TOL, effective_resistance, energy_kernel,
                      fin_part, harm_part, monopole, wired_monopole)
from .models import (ModelSpec, build, harmonic_energy, load_network,
                     log_increment_function, network_to_jsonable,
                     oracle_h_function, oracle_w_o_function, spec_of)
from .network import VertexFunction, make_exhaustion
from .randomwalk import (WalkConfig, escape_probability, green_estimate,
                         hitting_probability)
from .serialize import canonical_json, csv_text, fmt_float
from .transience import classify, grounded_parameter_sweep, harm_dimension_probe

EXIT_OK = 0
EXIT_DOMAIN = 2
EXIT_NUMERIC = 3


def _parse_vertex(text):
    try:
        value = ast.literal_eval(text)
    except (ValueError, SyntaxError):
        raise ConfigurationError(f"cannot parse vertex id {text!r}") from None
    if isinstance(value, int):
        return value
    if isinstance(value, tuple) and all(isinstance(t, int) for t in value):
        return value
    raise ConfigurationError(f"vertex ids are ints or int tuples, got {text!r}")


def _parse_plan(net, text):
    """Plan descriptors: balls:A..B | radii:2^k | radii:3^k | radii:1,2,4."""
    if text is None:
        cap = net.window_radius if not net.is_finite else None
        if cap is None:
            cap = max((net.distance(v) for v in net.vertices), default=1)
        return make_exhaustion(net, range(1, max(cap, 1) + 1))
    kind, _, rest = text.partition(":")
    cap = net.window_radius if not net.is_finite else max(
        net.distance(v) for v in net.vertices)
    if kind == "balls":
        a, sep, b = rest.partition("..")
        if not sep:
            raise ConfigurationError(f"expected balls:A..B, got {text!r}")
        return make_exhaustion(net, range(int(a), int(b) + 1), descriptor=text)
    if kind == "radii":
        if rest in ("2^k", "3^k"):
            base = int(rest[0])
            radii, r = [], base
            while r <= cap:
                radii.append(r)
                r *= base
            if not radii:
                raise ConfigurationError(f"window too small for plan {text!r}")
            return make_exhaustion(net, radii, descriptor=text)
        return make_exhaustion(net, [int(t) for t in rest.split(",")],
                               descriptor=text)
    raise ConfigurationError(f"unknown plan descriptor {text!r}")


def _load_net(args):
    if getattr(args, "net", None):
        try:
            with open(args.net, "r", encoding="utf-8") as fh:
                text = fh.read()
        except OSError as exc:
            raise ConfigurationError(f"cannot read network file: {exc}") from exc
        try:
            return load_network(text, radius=getattr(args, "radius", None))
        except (ValueError, KeyError, TypeError) as exc:
            raise ConfigurationError(
                f"malformed network JSON in {args.net}: {exc}") from exc
    if getattr(args, "model", None):
        family = args.model.replace("-", "_")
        params = {}
        if args.c is not None:
            params["c"] = args.c
        if args.arms is not None:
            params["arms"] = args.arms
        spec = ModelSpec(family, params)
        return build(spec, radius=args.radius if args.radius else None)
    raise ConfigurationError("specify either --net FILE or --model NAME")


def _resolve_function(net, plan, text):
    """Named presets binding oracles and computed kernels to --u/--v."""
    spec = spec_of(net)
    if text == "harm":
        if spec is None or spec.family != "geom_z":
            raise ConfigurationError("'harm' preset needs a geom-z model network")
        radius = plan.final_radius
        return oracle_h_function(spec, radius, unit_energy=True)
    if text == "w_o":
        if spec is not None and spec.family in ("geom_z", "geom_zplus"):
            return oracle_w_o_function(spec, plan.final_radius)
        return wired_monopole(net, net.origin, plan).approximant
    if text == "logu":
        if spec is None or spec.family != "log_increment_line":
            raise ConfigurationError("'logu' preset needs the log-increment-line model")
        return log_increment_function(plan.final_radius)
    if text.startswith("v:x="):
        x = _parse_vertex(text[4:])
        return energy_kernel(net, x, plan).approximant
    if text.startswith("file:"):
        path = text[5:]
        values = {}
        with open(path, "r", encoding="utf-8") as fh:
            for line in fh:
                line = line.strip()
                if not line or line.startswith("#") or line.startswith("vertex"):
                    continue
                vid, _, val = line.rpartition(",")
                vertex = _parse_vertex(vid.replace(";", ","))
                values[vertex] = float(val)
        return VertexFunction(values)
    raise ConfigurationError(f"unknown function preset {text!r}")


def _config_header(args, net, plan=None, tol=None):
    header = {"version": __version__, "seed": args.seed,
              "tol": tol if tol is not None else args.tol}
    if plan is not None:
        header["plan"] = plan.descriptor
    if getattr(args, "model", None):
        header["model"] = args.model
    if getattr(args, "net", None):
        header["net"] = args.net
    if net.model is not None:
        header["resolved_model"] = net.model
    return header


def _emit(args, text):
    if args.output and args.output != "-":
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _vertex_label(v):
    return ";".join(str(t) for t in v) if isinstance(v, tuple) else str(v)


# -- verb implementations ----------------------------------------------------


def _cmd_gen(args):
    net = _load_net(args)
    _emit(args, canonical_json(network_to_jsonable(net)) + "\n")
    return EXIT_OK


def _cmd_kernel(args):
    net = _load_net(args)
    plan = _parse_plan(net, args.plan)
    x = _parse_vertex(args.x)
    op = {KIND_DIPOLE: energy_kernel, KIND_FIN: fin_part, KIND_HARM: harm_part}[args.kind]
    tol = args.tol if args.tol is not None else POINTWISE_TOL
    element = op(net, x, plan, tol=tol)
    header = _config_header(args, net, plan, tol=tol)
    if args.format == "csv":
        rows = [( _vertex_label(v), val) for v, val in element.approximant.items()]
        meta = dict(header, kind=element.kind, base=_vertex_label(x),
                    converged=element.converged)
        _emit(args, csv_text(("vertex", "value"), rows, meta))
    else:
        payload = element.to_jsonable()
        payload["config"] = header
        _emit(args, canonical_json(payload) + "\n")
    return EXIT_OK if element.converged else EXIT_NUMERIC


def _cmd_monopole(args):
    net = _load_net(args)
    plan = _parse_plan(net, args.plan)
    x = _parse_vertex(args.x)
    tol = args.tol if args.tol is not None else ENERGY_CAUCHY_TOL
    element = monopole(net, x, plan, cauchy_tol=tol)
    payload = element.to_jsonable()
    payload["config"] = _config_header(args, net, plan, tol=tol)
    _emit(args, canonical_json(payload) + "\n")
    if element.converged or element.diverged:
        return EXIT_OK
    return EXIT_NUMERIC


def _cmd_gaussgreen(args):
    net = _load_net(args)
    plan = _parse_plan(net, args.plan)
    alt_plan = _parse_plan(net, args.alt_plan) if args.alt_plan else None
    u = _resolve_function(net, plan, args.u)
    v = u if args.v == args.u else _resolve_function(net, plan, args.v)
    tol = args.tol if args.tol is not None else LIMIT_TOL
    report = gauss_green(net, u, v, plan, alt_plan, limit_tol=tol)
    header = _config_header(args, net, plan, tol=tol)
    header["u"], header["v"] = args.u, args.v
    if args.format == "csv":
        rows = [(s.radius, s.size, s.energy, s.vertex_sum, s.boundary_sum, s.residual)
                for s in report.stages]
        meta = dict(header, verdict=report.verdict)
        if report.boundary_limit is not None:
            meta["boundary_limit"] = fmt_float(report.boundary_limit)
        _emit(args, csv_text(
            ("radius", "stage_size", "energy", "vertex_sum", "boundary_sum",
             "residual"), rows, meta))
    else:
        payload = report.to_jsonable()
        payload["config"] = header
        _emit(args, canonical_json(payload) + "\n")
    return EXIT_OK if report.verdict != VERDICT_INCONCLUSIVE else EXIT_NUMERIC


def _cmd_transience(args):
    net = _load_net(args)
    plan = _parse_plan(net, args.plan)
    cfg = WalkConfig(n_walks=args.walks, max_steps=args.steps, seed=args.seed)
    verdict = classify(net, plan, cfg)
    payload = verdict.to_jsonable()
    payload["config"] = _config_header(args, net, plan)
    _emit(args, canonical_json(payload) + "\n")
    return EXIT_OK if verdict.verdict != "inconclusive" else EXIT_NUMERIC


def _cmd_walk(args):
    net = _load_net(args)
    cfg = WalkConfig(n_walks=args.walks, max_steps=args.steps, seed=args.seed)
    header = {"version": __version__, "seed": args.seed, "walks": args.walks,
              "steps": args.steps, "op": args.op}
    if args.op == "hitting":
        est = hitting_probability(net, _parse_vertex(args.x),
                                  _parse_vertex(args.absorber),
                                  _parse_vertex(args.start), cfg)
        payload = {"estimate": est.value, "stderr": est.stderr,
                   "flags": list(est.flags), "n_walks": est.n_walks,
                   "seed": est.seed}
    elif args.op == "green":
        est = green_estimate(net, _parse_vertex(args.x),
                             _parse_vertex(args.y or args.x), cfg)
        payload = {"estimate": est.value, "stderr": est.stderr,
                   "flags": list(est.flags), "n_walks": est.n_walks,
                   "seed": est.seed, "meta": est.meta}
    else:
        radii = [int(t) for t in args.radii.split(",")]
        trace = escape_probability(net, net.origin, radii, cfg)
        payload = {"points": [list(p) for p in trace.points],
                   "capped": trace.capped, "exited": trace.exited,
                   "n_walks": trace.n_walks, "seed": trace.seed}
    payload["config"] = header
    _emit(args, canonical_json(payload) + "\n")
    return EXIT_OK


def _cmd_resistance(args):
    net = _load_net(args)
    plan = _parse_plan(net, args.plan)
    value = effective_resistance(net, _parse_vertex(args.x), _parse_vertex(args.y),
                                 plan, variant=args.variant)
    payload = {"resistance": value.value, "variant": value.variant,
               "converged": value.converged, "stages": list(value.stages),
               "config": _config_header(args, net, plan)}
    _emit(args, canonical_json(payload) + "\n")
    return EXIT_OK if value.converged else EXIT_NUMERIC


def _cmd_report(args):
    net = _load_net(args)
    plan = _parse_plan(net, args.plan)
    cfg = WalkConfig(n_walks=args.walks, max_steps=args.steps, seed=args.seed)
    verdict = classify(net, plan, cfg)
    rank, harm_detail = harm_dimension_probe(net, plan)
    payload = {
        "transience": verdict.to_jsonable(),
        "harmonic_dimension": rank,
        "harmonic_detail": harm_detail,
        "config": _config_header(args, net, plan),
    }
    spec = spec_of(net)
    if spec is not None and spec.family == "geom_z":
        payload["harmonic_oracle_energy"] = harmonic_energy(spec)
    if args.sweep:
        lo, hi, count = (float(t) for t in args.sweep.split(":"))
        cs = [lo + (hi - lo) * i / (count - 1) for i in range(int(count))]
        payload["grounded_sweep"] = grounded_parameter_sweep(cs)
    _emit(args, canonical_json(payload) + "\n")
    return EXIT_OK


def build_parser():
    parser = argparse.ArgumentParser(
        prog="resnet",
        description="Discrete potential theory on weighted graphs: kernels, "
                    "monopoles, Gauss-Green boundary terms and transience.")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="verb", required=True)

    def add_common(p, plan=True):
        p.add_argument("--net", help="network JSON file (explicit or model form)")
        p.add_argument("--model", help="built-in family (geom-z, geom-zplus, star, "
                                       "unit-line, binary-tree, log-increment-line)")
        p.add_argument("--c", type=float, default=None, help="conductance base")
        p.add_argument("--arms", type=int, default=None, help="star arm count")
        p.add_argument("--radius", type=int, default=None, help="window radius")
        p.add_argument("--seed", type=int,
                       default=int(os.environ.get("RESNET_SEED", "0")),
                       help="RNG seed (default: RESNET_SEED env or 0)")
        p.add_argument("--tol", type=float, default=None,
                       help="convergence tolerance (per-verb default when omitted)")
        p.add_argument("--format", choices=("json", "csv"), default="json")
        p.add_argument("-o", "--output", default="-", help="output path (default stdout)")
        if plan:
            p.add_argument("--plan", default=None,
                           help="exhaustion plan: balls:A..B, radii:2^k, radii:3^k, "
                                "or radii:R1,R2,...")

    p = sub.add_parser("gen", help="build a network and write its JSON")
    add_common(p, plan=False)
    p.set_defaults(fn=_cmd_gen)

    p = sub.add_parser("kernel", help="dipole kernel element and its parts")
    add_common(p)
    p.add_argument("--x", required=True, help="base vertex")
    p.add_argument("--kind", choices=(KIND_DIPOLE, KIND_FIN, KIND_HARM),
                   default=KIND_DIPOLE)
    p.set_defaults(fn=_cmd_kernel)

    p = sub.add_parser("monopole", help="monopole element via regularized solves")
    add_common(p)
    p.add_argument("--x", default="0", help="base vertex (default origin 0)")
    p.set_defaults(fn=_cmd_monopole)

    p = sub.add_parser("gaussgreen", help="stagewise Gauss-Green decomposition")
    add_common(p)
    p.add_argument("--u", required=True,
                   help="preset: harm | w_o | logu | v:x=N | file:PATH")
    p.add_argument("--v", required=True, help="same presets as --u")
    p.add_argument("--alt-plan", dest="alt_plan", default=None,
                   help="second plan for exhaustion-dependence detection")
    p.set_defaults(fn=_cmd_gaussgreen)

    p = sub.add_parser("transience", help="classify the network's random walk")
    add_common(p)
    p.add_argument("--walks", type=int, default=4000)
    p.add_argument("--steps", type=int, default=4000)
    p.set_defaults(fn=_cmd_transience)

    p = sub.add_parser("walk", help="Monte Carlo estimates")
    add_common(p, plan=False)
    p.add_argument("--op", choices=("hitting", "green", "escape"), required=True)
    p.add_argument("--x", default="0")
    p.add_argument("--y", default=None)
    p.add_argument("--start", default="0")
    p.add_argument("--absorber", default="0")
    p.add_argument("--radii", default="2,4,8,16")
    p.add_argument("--walks", type=int, default=100000)
    p.add_argument("--steps", type=int, default=100000)
    p.set_defaults(fn=_cmd_walk)

    p = sub.add_parser("resistance", help="effective resistance between two vertices")
    add_common(p)
    p.add_argument("--x", required=True)
    p.add_argument("--y", required=True)
    p.add_argument("--variant", choices=("free", "wired"), default="free")
    p.set_defaults(fn=_cmd_resistance)

    p = sub.add_parser("report", help="combined audit report for a network")
    add_common(p)
    p.add_argument("--walks", type=int, default=4000)
    p.add_argument("--steps", type=int, default=4000)
    p.add_argument("--sweep", default=None,
                   help="grounded-parameter sweep, LO:HI:COUNT over c")
    p.set_defaults(fn=_cmd_report)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except NumericalError as exc:
        print(f"resnet: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except ResnetError as exc:
        print(f"resnet: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except FileNotFoundError as exc:
        print(f"resnet: {exc}", file=sys.stderr)
        return EXIT_DOMAIN


if __name__ == "__main__":
    sys.exit(main())
