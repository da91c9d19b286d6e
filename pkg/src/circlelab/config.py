"""Run configurations, map specifications and CSV plot data.

Configs are JSON objects.  Rationals are written as "p/q" strings; decimal
literals are rejected wherever an exact value is expected.

Map specifications are either shorthand strings

    rigid:p/q        rotation by p/q turns (PwAffine)
    halfturn         x -> -1/x (PwMoebius)
    golden           rotation by an enclosure of (sqrt 5 - 1)/2 (Numeric)
    thmB.f, thmB.g, thmB.R   generators of the default commuting-pair group

or objects with a "type" key: rigid, pw_affine, pw_moebius, moebius.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field
from fractions import Fraction

from . import constructions as C
from . import piecewise as pw
from .errors import ParseError
from .numbers import fmt_number, fmt_rational, parse_number, parse_rational
from .reports import SCHEMA

# parameter name -> kind
PARAMS = {
    "L": "int",
    "radius": "int",
    "q_cap": "int",
    "steps": "int",
    "N": "int",
    "samples": "int",
    "draws": "int",
    "resolution": "int",
    "expected": "int",
    "grid": "int",
    "cap": "int",
    "eps": "rational",
    "eta": "rational",
    "delta": "rational",
    "width": "rational",
    "lambda": "rational",
    "mu": "rational",
    "rho": "rational",
    "interval": "pair",
    "kind": "str",
}

TOP_KEYS = {"schema", "command", "maps", "group", "params", "outputs", "seed"}
OUTPUT_KEYS = {"report", "csv", "graph"}


@dataclass
class RunConfig:
    command: str
    maps: dict = field(default_factory=dict)
    group: list = field(default_factory=list)
    params: dict = field(default_factory=dict)
    outputs: dict = field(default_factory=dict)
    seed: int = 0


def _parse_param(name, value):
    kind = PARAMS.get(name)
    loc = f"params.{name}"
    if kind is None:
        raise ParseError(f"unknown parameter {name!r}", loc)
    if kind == "int":
        if isinstance(value, bool) or not isinstance(value, int):
            raise ParseError(f"expected an integer, got {value!r}", loc)
        return value
    if kind == "rational":
        return parse_rational(value, loc)
    if kind == "pair":
        if not isinstance(value, list) or len(value) != 2:
            raise ParseError("expected a pair of rationals", loc)
        return tuple(parse_rational(v, loc) for v in value)
    if not isinstance(value, str):
        raise ParseError(f"expected a string, got {value!r}", loc)
    return value


def _dump_param(value):
    if isinstance(value, Fraction):
        return fmt_rational(value)
    if isinstance(value, tuple):
        return [fmt_rational(v) for v in value]
    return value


def parse_config(text) -> RunConfig:
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as e:
        raise ParseError(f"invalid JSON: {e.msg}", f"line {e.lineno}") from None
    if not isinstance(obj, dict):
        raise ParseError("config must be an object")
    unknown = set(obj) - TOP_KEYS
    if unknown:
        raise ParseError(f"unknown keys {sorted(unknown)}")
    if "schema" in obj and obj["schema"] != SCHEMA:
        raise ParseError(f"unsupported schema {obj['schema']!r}", "schema")
    if "command" not in obj:
        raise ParseError("missing 'command'")
    maps = obj.get("maps", {})
    if not isinstance(maps, dict):
        raise ParseError("'maps' must be an object", "maps")
    for name, spec in maps.items():
        parse_map(spec, f"maps.{name}")  # validate eagerly
    group = obj.get("group", [])
    if isinstance(group, str):
        group = [group]
    params = {k: _parse_param(k, v) for k, v in obj.get("params", {}).items()}
    outputs = obj.get("outputs", {})
    bad = set(outputs) - OUTPUT_KEYS
    if bad:
        raise ParseError(f"unknown output keys {sorted(bad)}", "outputs")
    seed = obj.get("seed", 0)
    if isinstance(seed, bool) or not isinstance(seed, int):
        raise ParseError("seed must be an integer", "seed")
    return RunConfig(obj["command"], dict(maps), list(group), params, dict(outputs), seed)


def serialize_config(cfg: RunConfig) -> str:
    obj = {
        "schema": SCHEMA,
        "command": cfg.command,
        "maps": cfg.maps,
        "group": cfg.group,
        "params": {k: _dump_param(v) for k, v in cfg.params.items()},
        "outputs": cfg.outputs,
        "seed": cfg.seed,
    }
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


# --- maps --------------------------------------------------------------------------


def _numbers(values, loc):
    if not isinstance(values, list):
        raise ParseError("expected a list", loc)
    return [parse_number(v, f"{loc}[{i}]") for i, v in enumerate(values)]


def _matrix(m, loc):
    if isinstance(m, list) and len(m) == 2 and all(isinstance(r, list) for r in m):
        m = m[0] + m[1]
    vals = _numbers(m, loc)
    if len(vals) != 4:
        raise ParseError("a matrix needs four entries", loc)
    return tuple(vals)


def parse_map(spec, loc="map", maps=None) -> pw.PiecewiseMap:
    """Build a PiecewiseMap from a shorthand string or a typed object."""
    if isinstance(spec, str):
        s = spec.strip()
        if maps and s in maps:
            return parse_map(maps[s], f"maps.{s}")
        if s.startswith("rigid:"):
            return pw.rigid(parse_rational(s[6:], loc))
        if s == "halfturn":
            return pw.half_turn()
        if s == "golden":
            return pw.rigid(C.golden_mean_enclosure())
        if s.startswith("thmB."):
            G = C.build_theorem_b()
            try:
                return {"f": G.f, "g": G.g, "R": G.R}[s[5:]]
            except KeyError:
                raise ParseError(f"unknown thmB generator {s!r}", loc) from None
        raise ParseError(f"unknown map shorthand {s!r}", loc)
    if not isinstance(spec, dict) or "type" not in spec:
        raise ParseError("a map is a shorthand string or an object with 'type'", loc)
    kind = spec["type"]
    allowed = {
        "rigid": {"angle"},
        "pw_affine": {"xs", "ys"},
        "pw_moebius": {"breakpoints", "matrices"},
        "moebius": {"matrix"},
    }
    if kind not in allowed:
        raise ParseError(f"unknown map type {kind!r}", loc)
    extra = set(spec) - allowed[kind] - {"type", "label"}
    if extra:
        raise ParseError(f"unknown keys {sorted(extra)}", loc)
    label = spec.get("label")
    try:
        if kind == "rigid":
            return pw.rigid(parse_rational(spec["angle"], f"{loc}.angle"))
        if kind == "pw_affine":
            return pw.pw_affine_graph(_numbers(spec["xs"], f"{loc}.xs"), _numbers(spec["ys"], f"{loc}.ys"), label=label)
        if kind == "pw_moebius":
            mats = [_matrix(m, f"{loc}.matrices[{i}]") for i, m in enumerate(spec["matrices"])]
            return pw.pw_moebius(_numbers(spec["breakpoints"], f"{loc}.breakpoints"), mats, label=label)
        return pw.moebius_map(_matrix(spec["matrix"], f"{loc}.matrix"), label=label)
    except KeyError as e:
        raise ParseError(f"missing key {e.args[0]!r}", loc) from None
    except ValueError as e:
        raise ParseError(str(e), loc) from None


def map_to_spec(f: pw.PiecewiseMap):
    """Typed-object spec of an exact map (inverse of ``parse_map``)."""
    if f.universe == pw.PW_AFFINE:
        F = f.lift
        if F.is_translation:
            return {"type": "rigid", "angle": fmt_rational(F.shift)}
        xs = list(F.knots)
        return {"type": "pw_affine", "xs": [fmt_rational(x) for x in xs], "ys": [fmt_rational(F(x)) for x in xs]}
    if f.universe == pw.PW_MOEBIUS:
        return {
            "type": "pw_moebius",
            "breakpoints": [fmt_number(b) for b in f.breakpoints()],
            "matrices": [[fmt_number(v) for v in m] for m in f.pieces()],
        }
    raise ParseError("numeric maps have no serial form")


def parse_group(items, maps=None):
    """(generators, names) from a list of map specs or a named group."""
    if items == ["thmB"] or items == "thmB":
        G = C.build_theorem_b()
        return G.gens, G.names
    gens, names = [], []
    for i, it in enumerate(items):
        for part in it.split(",") if isinstance(it, str) else [it]:
            gens.append(parse_map(part, f"group[{i}]", maps))
            names.append(part if isinstance(part, str) and maps and part in maps else f"g{len(names)}")
    return gens, names


# --- CSV plot data ------------------------------------------------------------------


def _csv_text(header, rows):
    buf = io.StringIO()
    buf.write(f"# schema: {SCHEMA}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def graph_csv(f: pw.PiecewiseMap, resolution=256, width=Fraction(1, 10**12)):
    """Samples (x, F(x)) of the normalized lift; decimal columns are approximate."""
    rows = []
    exact_affine = f.is_exact and f.universe == pw.PW_AFFINE
    nm = None if exact_affine else f.to_numeric()
    for i in range(resolution):
        x = Fraction(i, resolution)
        if exact_affine:
            y = f.lift(x)
            rows.append([fmt_rational(x), fmt_rational(y), fmt_rational(y), f"{float(y):.12f}"])
        else:
            e = nm.enclose(x, width)
            rows.append([fmt_rational(x), fmt_rational(e.lo), fmt_rational(e.hi), f"{float(e.mid):.12f}"])
    return _csv_text(["x", "fx_lo", "fx_hi", "fx_approx"], rows)


def trace_csv(trace):
    """Iteration trace: q_n growth and Dirichlet widths 1/q_n^2."""
    rows = []
    for s in trace.steps:
        wd = s.interval.width
        rows.append([s.n, s.p, s.q, fmt_rational(wd), f"{float(wd):.6e}", "" if s.delta is None else fmt_rational(s.delta)])
    return _csv_text(["n", "p", "q", "width_exact", "width_approx", "delta"], rows)


def crossings_csv(report):
    """Crossing locations as bracketing enclosures."""
    rows = []
    for c in report.crossings:
        co = c.point.coord
        lo, hi = (co.lo, co.hi) if hasattr(co, "lo") else (co, co)
        if hasattr(lo, "numerator"):
            rows.append([c.kind, fmt_rational(lo), fmt_rational(hi), f"{float((lo + hi) / 2):.12f}"])
        else:
            rows.append([c.kind, str(lo), str(hi), ""])
    return _csv_text(["type", "x_lo", "x_hi", "x_approx"], rows)


def report_text(obj) -> str:
    """Canonical JSON text of a report, with the schema string first."""
    if isinstance(obj, dict) and "schema" not in obj:
        obj = {"schema": SCHEMA, **obj}
    elif not isinstance(obj, dict):
        obj = {"schema": SCHEMA, "data": obj}
    return json.dumps(obj, indent=2, sort_keys=True, default=str) + "\n"


__all__ = [
    "RunConfig",
    "parse_config",
    "serialize_config",
    "parse_map",
    "map_to_spec",
    "parse_group",
    "graph_csv",
    "trace_csv",
    "crossings_csv",
    "report_text",
]
