"""Command-line front end.

Every command prints a short summary line and can write a JSON report
(``--report``) and CSV data (``--csv``).  Exit status: 0 success, 2 a checked
claim failed, 3 bad input or an undecided computation.
"""

from __future__ import annotations

import argparse
import random
import sys
from fractions import Fraction
from pathlib import Path

from . import analysis as A
from . import constructions as C
from . import piecewise as pw
from . import rotation as R
from .config import (
    RunConfig,
    crossings_csv,
    graph_csv,
    parse_config,
    parse_group,
    parse_map,
    report_text,
    trace_csv,
)
from .core import ANGLE, CircleInterval, CirclePoint
from .errors import CircleLabError, ClaimViolated, InputError
from .numbers import fmt_rational, parse_rational

EXIT_OK, EXIT_CLAIM, EXIT_INPUT = 0, 2, 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INPUT, f"{self.prog}: error: {message}\n")


def _rat(text):
    try:
        return parse_rational(text)
    except InputError as e:
        raise argparse.ArgumentTypeError(str(e)) from None


def build_parser():
    p = _Parser(prog="circlelab", description="Exact and certified circle-homeomorphism computations.")
    p.add_argument("--config", help="JSON run configuration (overrides the subcommand)")
    sub = p.add_subparsers(dest="command", parser_class=_Parser)

    def cmd(name, help_):
        s = sub.add_parser(name, help=help_)
        s.add_argument("--report", help="write the JSON report here")
        s.add_argument("--csv", help="write CSV data here")
        s.add_argument("--seed", type=int, default=0)
        return s

    s = cmd("rot", "rotation number with certificate")
    s.add_argument("--map", required=True)
    s.add_argument("--q-cap", type=int, default=10**4)
    s.add_argument("--resolution", type=int, default=256, help="rows of the graph CSV")

    s = cmd("classify", "Moebius-like classification of one element")
    s.add_argument("--map", required=True)

    s = cmd("crossings", "crossings of two maps")
    s.add_argument("--map", required=True)
    s.add_argument("--map2", required=True)

    s = cmd("wordball", "fixed-point statistics over a word ball")
    s.add_argument("--group", required=True, help="thmB or comma-separated map specs")
    s.add_argument("--radius", type=int, default=6)
    s.add_argument("--expected", type=int, help="claimed bound on fixed points (exit 2 if exceeded)")

    s = cmd("elementary", "finite orbit / rotation-homomorphism evidence")
    s.add_argument("--group", required=True)
    s.add_argument("--radius", type=int, default=4)

    s = cmd("construct", "build a named construction")
    s.add_argument("kind", choices=["thmB", "prop41", "denjoy"])
    s.add_argument("--lambda", dest="lam", type=_rat, default=Fraction(2))
    s.add_argument("--mu", type=_rat, default=Fraction(3))
    s.add_argument("--rho", type=_rat, default=Fraction(1, 7))
    s.add_argument("--radius", type=int, default=4)
    s.add_argument("--samples", type=int, default=1000)
    s.add_argument("--eps", type=_rat, default=Fraction(1, 10**6))
    s.add_argument("--resolution", type=int, default=256)

    s = cmd("lemma-perturb", "perturbation step on a finite-order map")
    s.add_argument("--map", required=True)
    s.add_argument("--eps", type=_rat, default=Fraction(1, 10))
    s.add_argument("--draws", type=int, default=10)

    s = cmd("lemma-irrational", "iterate perturbations towards an irrational rotation number")
    s.add_argument("--h0", required=True)
    s.add_argument("--steps", type=int, default=6)
    s.add_argument("--supply", choices=["rigid", "conjugated", "random"], default="rigid")

    s = cmd("amplify", "conjugate local closeness into global closeness")
    s.add_argument("--map", required=True, help="the expanding map f")
    s.add_argument("--map2", required=True, help="the map g close to id on an interval")
    s.add_argument("--interval", nargs=2, type=_rat, metavar=("A", "B"))
    s.add_argument("--eta", type=_rat, default=Fraction(1, 10))
    s.add_argument("--calibrate", type=_rat, help="instead find m with eps/4 < d(g^m, id) <= eps/2")

    s = cmd("gapprobe", "crossings of f^q with a small rotation near the largest blow-up gaps")
    s.add_argument("--delta", type=_rat, default=Fraction(1, 100))
    s.add_argument("--N", type=int, default=1)
    return p


# --- commands -------------------------------------------------------------------------


def _out(args, report, summary, csv_text=None):
    print(summary)
    if getattr(args, "report", None):
        Path(args.report).write_text(report_text(report))
    if getattr(args, "csv", None) and csv_text is not None:
        Path(args.csv).write_text(csv_text)


def run_rot(args):
    f = parse_map(args.map, "--map")
    r = R.rotation_number(f, q_cap=args.q_cap)
    _out(args, {"command": "rot", "rot": r.to_json()}, str(r), graph_csv(f, args.resolution))
    return EXIT_OK


def run_classify(args):
    c = A.classify_element(parse_map(args.map, "--map"))
    _out(args, c.to_json(), c.kind + (f": {c.reason}" if c.reason else ""))
    return EXIT_OK


def run_crossings(args):
    rep = A.crossing_report(parse_map(args.map, "--map"), parse_map(args.map2, "--map2"))
    _out(args, rep.to_json(), f"{rep.count} crossings", crossings_csv(rep))
    return EXIT_OK


def run_wordball(args):
    gens, names = parse_group([args.group])
    rep = A.word_ball_max_fixed(gens, args.radius, names=names)
    out = rep.to_json()
    _out(args, out, f"max_fixed_points={rep.max_fixed_points} witness={rep.witness}")
    if args.expected is not None and rep.max_fixed_points > args.expected:
        print(f"claim violated: {rep.max_fixed_points} > {args.expected}", file=sys.stderr)
        return EXIT_CLAIM
    return EXIT_OK


def run_elementary(args):
    gens, names = parse_group([args.group])
    cert = A.finite_orbit_search(gens, L=args.radius)
    _out(args, cert.to_json(), f"{cert.kind}" + (f" order={cert.order}" if cert.order else ""))
    return EXIT_OK


def run_construct(args):
    if args.kind == "thmB":
        G = C.build_theorem_b(args.lam, args.mu)
        mat = C.involution_action_matrix(G)
        rep = {"command": "construct thmB", "group": G.to_json(), "involution_matrix": mat}
        _out(args, rep, f"relations {G.relations} matrix {mat}", graph_csv(G.f, args.resolution))
        return EXIT_OK if all(G.relations.values()) else EXIT_CLAIM
    if args.kind == "prop41":
        G = C.build_prop41(rho=args.rho, L=args.radius)
        fp = C.prop41_blown_fixed_points(G)
        rep = {"command": "construct prop41", "group": G.to_json(), "blown_T_alpha_fixed_points": fp.to_json()}
        _out(args, rep, f"no relation in {G.words_checked} words; blown T_alpha fixed points: {fp.count}")
        return EXIT_OK
    b = C.golden_denjoy()
    ok, witness = C.semiconjugacy_check(b, args.samples, args.eps)
    gaps = [[fmt_rational(a), fmt_rational(c)] for a, c in b.largest_gaps(3)]
    rep = {
        "command": "construct denjoy",
        "spec": b.spec.to_json(),
        "total_gap": fmt_rational(b.total_gap),
        "largest_gaps": gaps,
        "semiconjugacy": ok,
        "witness": None if witness is None else fmt_rational(witness),
    }
    _out(args, rep, f"semiconjugacy {'ok' if ok else 'FAILED at ' + str(witness)}")
    return EXIT_OK if ok else EXIT_CLAIM


def run_lemma_perturb(args):
    f = parse_map(args.map, "--map")
    rng = random.Random(args.seed)
    delta = R.delta_search(f, args.eps)
    results = []
    for _ in range(args.draws):
        g = R.random_positive_pl(delta, rng)
        results.append(R.perturbation_step(f, g, args.eps).to_json())
    hits = sum(r["in_target"] and r["dc0_ok"] for r in results)
    rep = {"command": "lemma-perturb", "delta": fmt_rational(delta), "results": results, "hits": hits}
    _out(args, rep, f"delta={delta} in_target {hits}/{args.draws}")
    return EXIT_OK if hits == args.draws else EXIT_CLAIM


def run_lemma_irrational(args):
    h0 = parse_map(args.h0, "--h0")
    supply = {
        "rigid": R.RigidSupply,
        "conjugated": lambda: R.ConjugatedRotationSupply(R.symmetric_conjugator(R.rotation_number(h0).value.denominator)),
        "random": lambda: R.RandomPLSupply(args.seed),
    }[args.supply]()
    trace = R.irrational_scheme(h0, supply, steps=args.steps)
    ok = R.dirichlet_nesting_check(trace)
    rep = {"command": "lemma-irrational", "trace": trace.to_json(), "nesting_ok": ok}
    qs = [s.q for s in trace.steps]
    _out(args, rep, f"q_n = {qs}, nesting {'ok' if ok else 'FAILED'}", trace_csv(trace))
    return EXIT_OK if ok else EXIT_CLAIM


def run_amplify(args):
    f = parse_map(args.map, "--map")
    g = parse_map(args.map2, "--map2")
    if args.calibrate is not None:
        m = A.power_distance_calibrate(g, args.calibrate)
        _out(args, {"command": "amplify", "calibrate": fmt_rational(args.calibrate), "m": m}, f"m={m}")
        return EXIT_OK
    if args.interval is None:
        raise InputError("--interval A B is required unless --calibrate is given")
    I = CircleInterval(CirclePoint(ANGLE, args.interval[0]), CirclePoint(ANGLE, args.interval[1]))
    m, _ = A.amplify_local_closeness(f, g, I, args.eta)
    _out(args, {"command": "amplify", "m": m, "eta": fmt_rational(args.eta)}, f"m={m}")
    return EXIT_OK


def run_gapprobe(args):
    b = C.golden_denjoy()
    rep = A.gap_crossing_probe(b, pw.rigid(args.delta), N=args.N)
    _out(args, rep.to_json(), f"{rep.count} certified crossings (expected >= {2 * args.N})", crossings_csv(rep))
    return EXIT_OK


COMMANDS = {
    "rot": run_rot,
    "classify": run_classify,
    "crossings": run_crossings,
    "wordball": run_wordball,
    "elementary": run_elementary,
    "construct": run_construct,
    "lemma-perturb": run_lemma_perturb,
    "lemma-irrational": run_lemma_irrational,
    "amplify": run_amplify,
    "gapprobe": run_gapprobe,
}


def args_from_config(cfg: RunConfig, parser):
    """Translate a RunConfig into the argument list of its subcommand."""
    P = cfg.params
    words = cfg.command.split()
    argv = list(words)
    maps = cfg.maps

    def mapref(name):
        spec = maps.get(name, name)
        if not isinstance(spec, str):
            raise InputError(f"config map {name!r}: only shorthand specs can be passed on the command line")
        return spec

    names = list(maps)
    if words[0] in ("rot", "classify", "lemma-perturb") and names:
        argv += ["--map", mapref(names[0])]
    if words[0] in ("crossings", "amplify") and len(names) >= 2:
        argv += ["--map", mapref(names[0]), "--map2", mapref(names[1])]
    if words[0] == "lemma-irrational" and names:
        argv += ["--h0", mapref(names[0])]
    if words[0] in ("wordball", "elementary") and cfg.group:
        argv += ["--group", ",".join(mapref(g) for g in cfg.group)]
    flag = {
        "radius": "--radius",
        "L": "--radius",
        "q_cap": "--q-cap",
        "steps": "--steps",
        "eps": "--eps",
        "eta": "--eta",
        "delta": "--delta",
        "N": "--N",
        "samples": "--samples",
        "draws": "--draws",
        "expected": "--expected",
        "resolution": "--resolution",
        "lambda": "--lambda",
        "mu": "--mu",
        "rho": "--rho",
    }
    for k, v in P.items():
        if k == "interval":
            argv += ["--interval", fmt_rational(v[0]), fmt_rational(v[1])]
        elif k in flag:
            argv += [flag[k], fmt_rational(v) if isinstance(v, Fraction) else str(v)]
    for k in ("report", "csv"):
        if k in cfg.outputs:
            argv += [f"--{k}", cfg.outputs[k]]
    argv += ["--seed", str(cfg.seed)]
    return parser.parse_args(argv)


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.config:
            cfg = parse_config(Path(args.config).read_text())
            args = args_from_config(cfg, parser)
        if not args.command:
            parser.print_help()
            return EXIT_INPUT
        return COMMANDS[args.command](args)
    except ClaimViolated as e:
        print(f"claim violated: {e}", file=sys.stderr)
        return EXIT_CLAIM
    except CircleLabError as e:
        print(f"error: {type(e).__name__}: {e}", file=sys.stderr)
        return EXIT_INPUT
    except OSError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
