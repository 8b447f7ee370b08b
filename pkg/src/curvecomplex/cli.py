"""Command-line front end: ``curvecomplex <command> [options]``.

Every command writes one JSON report (stdout, or ``--out``) carrying the
tool version, report schema, config echo, universe fingerprint, seed and
wall-clock.  Exit codes: 0 success, 2 bad config or unmet precondition,
3 I/O failure, 4 internal invariant violation.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import logging
import random
import sys
import time
from datetime import datetime, timezone
from pathlib import Path

from . import __version__
from .classify import ClassifyError, Classifier, audit_c0_pairs, audit_cut_surfaces
from .curvegraph import (GraphError, InvariantViolation, build_graph, connected_components, fill_loop, layers,
                         random_loops, sphere, sphere_census)
from .curves import pants_curve
from .disk import DiskConstraints, verify_disk
from .intersection import CutError, cut_along
from .normal import DEFAULT_CURVE_CEILING
from .projection import Subsurface, bgit_scan, lipschitz_check, sample_pairs
from .surface import SurfaceError, make_surface
from .surgery import PushBudgets, context, push_loop, sample_loops
from .universe import BudgetExceeded, CACHE_ENV, cache_path, get_universe

log = logging.getLogger("curvecomplex")

REPORT_SCHEMA = "curvecomplex.report"
REPORT_SCHEMA_VERSION = 1

DEFAULTS = {
    "surface": None,
    "max_weight": 2,
    "edge_rule": "disjoint",
    "jobs": 1,
    "seed": 0,
    "origin": "first-pants",
    "radius": 1,
    "radii": "0,1,2,3",
    "samples": 10,
    "path_budget": 1000,
    "area_budget": 10,
    "node_budget": 200_000,
    "rewrite_budget": 200,
    "ceiling": DEFAULT_CURVE_CEILING,
    "check": "all",
    "subsurface_from": "first-nonseparating",
    "component": None,
    "curve": None,
    "loop": None,
    "lipschitz": False,
    "intersections": False,
    "no_cache": False,
    "out": None,
    "dot": None,
    "graph_json": None,
}

INT_KEYS = {"max_weight", "jobs", "seed", "radius", "samples", "path_budget", "area_budget", "node_budget",
            "rewrite_budget", "ceiling", "component"}
BOOL_KEYS = {"lipschitz", "intersections", "no_cache"}


class ConfigError(ValueError):
    def __init__(self, code: str, message: str):
        super().__init__(f"{code}: {message}")
        self.code = code


# -- config ------------------------------------------------------------------
def read_config_file(path) -> dict:
    """Flat ``key = value`` lines; ``#`` starts a comment; keys mirror the long flags."""
    out = {}
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError("BAD_CONFIG", f"{path}:{lineno}: expected key = value")
        key, value = (s.strip() for s in line.split("=", 1))
        key = key.lstrip("-").replace("-", "_")
        if key not in DEFAULTS:
            raise ConfigError("BAD_CONFIG", f"{path}:{lineno}: unknown key {key!r}")
        out[key] = value
    return out


def _coerce(key, value):
    if value is None:
        return None
    if key in INT_KEYS:
        try:
            return int(value)
        except (TypeError, ValueError):
            raise ConfigError("BAD_CONFIG", f"{key} must be an integer, got {value!r}") from None
    if key in BOOL_KEYS:
        if isinstance(value, bool):
            return value
        return str(value).strip().lower() in ("1", "true", "yes", "on")
    return value


def resolve_config(args: argparse.Namespace) -> dict:
    """Defaults, then the config file, then explicit flags (flags win)."""
    cfg = dict(DEFAULTS)
    if getattr(args, "config", None):
        cfg.update(read_config_file(args.config))
    for key in DEFAULTS:
        v = getattr(args, key, None)
        if v is not None and v is not False:
            cfg[key] = v
    cfg = {k: _coerce(k, v) for k, v in cfg.items()}
    cfg["command"] = args.command
    if cfg["surface"] is None:
        raise ConfigError("BAD_CONFIG", "--surface g,n is required")
    try:
        g, n = (int(s) for s in str(cfg["surface"]).split(","))
    except ValueError:
        raise ConfigError("BAD_CONFIG", f"--surface expects g,n, got {cfg['surface']!r}") from None
    make_surface(g, n)
    cfg["surface"] = [g, n]
    for key in ("max_weight", "jobs", "samples", "path_budget", "area_budget", "node_budget", "rewrite_budget",
                "ceiling"):
        if cfg[key] is not None and cfg[key] < 1:
            raise ConfigError("BAD_CONFIG", f"{key} must be positive")
    if cfg["radius"] < 0:
        raise ConfigError("BAD_CONFIG", "radius must be non-negative")
    return cfg


# -- parsing helpers ---------------------------------------------------------
def parse_curve(text: str) -> tuple:
    try:
        return tuple(int(v) for v in text.replace(" ", "").split(","))
    except ValueError:
        raise ConfigError("BAD_CURVE", f"cannot read curve coordinates {text!r}") from None


def parse_curves(text: str) -> list:
    return [parse_curve(part) for part in text.split(";") if part.strip()]


def _check_length(u, c):
    if len(c) != u.tri.num_edges:
        raise ConfigError("BAD_CURVE", f"curve has {len(c)} coordinates, the triangulation has {u.tri.num_edges} edges")


def resolve_origin(spec: str, u, cl: Classifier) -> tuple:
    """Origin from coordinates, ``pants:i,j``, ``first-pants`` or ``first-nonseparating``."""
    spec = str(spec).strip()
    if spec == "first-pants":
        for c in u.curves:
            if cl.is_pants_curve(c):
                return c
        raise GraphError("ORIGIN_MISSING", "the universe has no pants curve")
    if spec == "first-nonseparating":
        for c in u.curves:
            if len(cut_along(u.tri, [c]).components) == 1:
                return c
        raise GraphError("ORIGIN_MISSING", "the universe has no non-separating curve")
    if spec.startswith("pants:"):
        try:
            p1, p2 = (int(s) for s in spec[6:].split(","))
        except ValueError:
            raise ConfigError("BAD_ORIGIN", f"cannot read {spec!r}") from None
        if not (1 <= p1 <= u.punctures and 1 <= p2 <= u.punctures and p1 != p2):
            raise ConfigError("BAD_ORIGIN", f"punctures in {spec!r} must be distinct labels 1..{u.punctures}")
        c = pants_curve(u.tri, p1, p2)
    else:
        c = parse_curve(spec)
        _check_length(u, c)
    if c not in u:
        raise GraphError("ORIGIN_MISSING", f"origin {list(c)} is not in the universe")
    return c


# -- reports -----------------------------------------------------------------
def _canonical(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))


def make_report(cfg: dict, u, result: dict, started: datetime, t0: float) -> dict:
    echo = {k: v for k, v in cfg.items() if k not in ("out",)}
    return {
        "schema": REPORT_SCHEMA,
        "schema_version": REPORT_SCHEMA_VERSION,
        "tool_version": __version__,
        "command": cfg["command"],
        "config": echo,
        "universe": None if u is None else {
            "fingerprint": u.fingerprint, "surface": [u.genus, u.punctures], "W": u.W,
            "curves": len(u), "triangulation": u.tri.fingerprint},
        "seed": cfg["seed"],
        "wall_clock": {"started": started.isoformat(timespec="seconds"), "seconds": round(time.perf_counter() - t0, 3)},
        "result": result,
        "result_sha256": hashlib.sha256(_canonical(result).encode()).hexdigest(),
    }


def _write(path, text: str) -> None:
    p = Path(path)
    if p.parent and not p.parent.exists():
        p.parent.mkdir(parents=True, exist_ok=True)
    p.write_text(text)


# -- commands ----------------------------------------------------------------
def _universe(cfg, intersections=False):
    g, n = cfg["surface"]
    u, hit = get_universe(g, n, cfg["max_weight"], jobs=cfg["jobs"], intersections=intersections,
                          use_cache=not cfg["no_cache"], ceiling=cfg["ceiling"])
    return u, hit


def _graph(cfg, u):
    return build_graph(u, cfg["edge_rule"], jobs=cfg["jobs"])


def cmd_enumerate(cfg):
    u, hit = _universe(cfg, intersections=cfg["intersections"])
    path = cache_path(u.genus, u.punctures, u.W)
    msg = "cache hit, fingerprint verified" if hit else "enumerated and cached"
    if cfg["no_cache"]:
        msg = "enumerated (cache disabled)"
    log.info("%s: %d curves", msg, len(u))
    return u, {"curves": len(u), "complete": u.complete, "cache_hit": hit, "cache_file": str(path),
               "intersections": u.has_intersections(), "message": msg}


def cmd_graph(cfg):
    u, _ = _universe(cfg)
    g = _graph(cfg, u)
    degrees = [len(a) for a in g.adj]
    comps = connected_components(g)
    if cfg["dot"]:
        _write(cfg["dot"], g.to_dot())
    if cfg["graph_json"]:
        _write(cfg["graph_json"], json.dumps(g.to_json()))
    return u, {"rule": g.rule.value, "farey": g.farey, "vertices": len(g), "edges": g.num_edges,
               "max_degree": max(degrees, default=0), "isolated": sum(1 for d in degrees if d == 0),
               "components": len(comps)}


def _origin_graph(cfg):
    u, _ = _universe(cfg)
    g = _graph(cfg, u)
    o = resolve_origin(cfg["origin"], u, Classifier(u.tri))
    return u, g, o


def cmd_sphere(cfg):
    u, g, o = _origin_graph(cfg)
    s = sphere(g, o, cfg["radius"])
    comps = connected_components(g, s.vertices)
    if cfg["dot"]:
        _write(cfg["dot"], g.to_dot(s.vertices, layers(g, o)))
    return u, {"origin": list(o), "r": s.r, "vertices": len(s.vertices), "edges": len(s.edges),
               "components": len(comps), "component_sizes": [len(c) for c in comps],
               "curves": [list(g.curve(i)) for i in s.vertices]}


def _radii(cfg) -> list:
    try:
        radii = [int(v) for v in str(cfg["radii"]).split(",") if v.strip()]
    except ValueError:
        raise ConfigError("BAD_CONFIG", f"--radii expects integers, got {cfg['radii']!r}") from None
    if any(r < 0 for r in radii):
        raise ConfigError("BAD_CONFIG", "radii must be non-negative")
    return radii


def cmd_census(cfg):
    u, g, o = _origin_graph(cfg)
    return u, sphere_census(g, o, _radii(cfg))


CHECKS = {"good-vertices": ("vertices",), "good-edges": ("edges",), "c0": ("c0",),
          "all": ("vertices", "edges", "c0")}


def cmd_classify(cfg):
    if cfg["check"] not in CHECKS:
        raise ConfigError("BAD_CONFIG", f"--check must be one of {sorted(CHECKS)}")
    u, _ = _universe(cfg)
    A = u.disjointness(cfg["jobs"])
    pairs = [(u.curves[i], u.curves[j]) for i in range(len(u)) for j in range(i + 1, len(u)) if A[i, j]]
    cl = Classifier(u.tri)
    checks = CHECKS[cfg["check"]]
    reports = audit_cut_surfaces(cl, u.curves, pairs, checks)
    result = {}
    if "c0" in checks:
        reports["c0_ambient"] = audit_c0_pairs(cl, pairs)
    for name, rep in reports.items():
        result[name] = rep.to_dict()
    total = sum(len(r.violations) for r in reports.values())
    result["message"] = f"{total} violations"
    c0_bad = sum(len(reports[k].violations) for k in ("c0", "c0_ambient") if k in reports)
    if c0_bad:
        raise InvariantViolation(f"C0 definitions disagree on {c0_bad} pairs: {_canonical(result)[:2000]}")
    return u, result


def _subsurface(cfg, u):
    spec = str(cfg["subsurface_from"])
    cl = Classifier(u.tri)
    if spec in ("first-nonseparating", "first-pants") or spec.startswith("pants:"):
        X = [resolve_origin(spec, u, cl)]
    else:
        X = parse_curves(spec)
        for x in X:
            _check_length(u, x)
    try:
        comps = cut_along(u.tri, X).components
    except CutError as exc:
        raise ConfigError("BAD_SUBSURFACE", str(exc)) from None
    k = cfg["component"]
    if k is None:
        k = next((i for i, c in enumerate(comps) if not c.is_pants), 0)
    if not 0 <= k < len(comps):
        raise ConfigError("BAD_SUBSURFACE", f"component {k} out of range (cut has {len(comps)})")
    if comps[k].is_pants:
        raise ConfigError("BAD_SUBSURFACE", "the chosen component is a pair of pants")
    return Subsurface(u.tri, X, k)


def cmd_project(cfg):
    u, _ = _universe(cfg)
    V = _subsurface(cfg, u)
    if cfg["curve"]:
        targets = parse_curves(cfg["curve"])
        for c in targets:
            _check_length(u, c)
    else:
        targets = list(u.curves)
    rows = [V.project(c).to_dict() | {"curve": list(c)} for c in targets]
    nonempty = sum(1 for r in rows if r["curves"])
    return u, {"subsurface": V.describe(), "projected": len(rows), "nonempty": nonempty, "rows": rows}


def cmd_bgit(cfg):
    u, _ = _universe(cfg)
    g = _graph(cfg, u)
    V = _subsurface(cfg, u)
    inside = [c for c in u.curves if V.contains(c)]
    idx = sample_pairs(len(u), cfg["samples"], cfg["seed"])
    pairs = [(u.curves[i], u.curves[j]) for i, j in idx]
    result = bgit_scan(g, V, pairs, cfg["path_budget"], inside)
    result["curves_in_V"] = len(inside)
    if cfg["lipschitz"]:
        A = u.disjointness(cfg["jobs"])
        dpairs = [(u.curves[i], u.curves[j]) for i in range(len(u)) for j in range(i + 1, len(u)) if A[i, j]]
        result["lipschitz"] = lipschitz_check(V, dpairs, inside)
    return u, result


def cmd_push(cfg):
    u, g, o = _origin_graph(cfg)
    if g.rule.value != "disjoint":
        raise ConfigError("BAD_CONFIG", "push runs on the disjointness graph (--edge-rule disjoint)")
    ctx = context(g, o)
    rng = random.Random(cfg["seed"])
    loops = sample_loops(ctx, cfg["radius"], cfg["samples"], rng)
    budgets = PushBudgets(area=cfg["area_budget"], nodes=cfg["node_budget"], rewrites=cfg["rewrite_budget"],
                          path_nodes=cfg["path_budget"])
    outcomes = [push_loop(L, o, ctx, cfg["radius"], budgets) for L in loops]
    if cfg["dot"]:
        d = Path(cfg["dot"])
        d.mkdir(parents=True, exist_ok=True)
        for k, oc in enumerate(outcomes):
            if oc:
                _write(d / f"push_{k}.dot", oc.witness["disk"].to_dot(ctx.layer))
    counts = {}
    for oc in outcomes:
        counts[oc.status.value] = counts.get(oc.status.value, 0) + 1
    return u, {"origin": list(o), "r": cfg["radius"], "loops_requested": cfg["samples"], "loops_found": len(loops),
               "status_counts": counts, "transcripts": [oc.to_dict() for oc in outcomes]}


def cmd_fill(cfg):
    u, _ = _universe(cfg)
    g = _graph(cfg, u)
    if cfg["loop"]:
        loops = [parse_curves(cfg["loop"])]
        for L in loops:
            for c in L:
                _check_length(u, c)
    else:
        o = resolve_origin(cfg["origin"], u, Classifier(u.tri))
        verts = sphere(g, o, cfg["radius"]).vertices
        loops = [[g.curve(i) for i in L]
                 for L in random_loops(g, verts, cfg["samples"], random.Random(cfg["seed"]))]
    rows = []
    for L in loops:
        fr = fill_loop(g, L, area_budget=cfg["area_budget"], node_budget=cfg["node_budget"])
        row = {"loop": [list(c) for c in L], "status": fr.status, "faces_tried": fr.faces_tried, "nodes": fr.nodes}
        if fr:
            viol = verify_disk(fr.disk, DiskConstraints(u.tri, loop=L, check_edges=not g.farey))
            viol += [e for e in fr.disk.edges()
                     if not g.has_edge(g.index_of(fr.disk.labels[e[0]]), g.index_of(fr.disk.labels[e[1]]))]
            if viol:
                raise InvariantViolation(f"fill_loop returned a disk failing verification: {viol}")
            row["faces"] = len(fr.disk.faces)
            row["disk"] = fr.disk.to_dict()
        rows.append(row)
    return u, {"fills": rows, "filled": sum(1 for r in rows if r["status"] == "FILLED")}


COMMANDS = {
    "enumerate": cmd_enumerate,
    "graph": cmd_graph,
    "sphere": cmd_sphere,
    "census": cmd_census,
    "classify": cmd_classify,
    "project": cmd_project,
    "bgit": cmd_bgit,
    "push": cmd_push,
    "fill": cmd_fill,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--surface", help="g,n")
    common.add_argument("--max-weight", type=int, help="weight bound W of the curve universe")
    common.add_argument("--edge-rule", choices=["disjoint", "c0", "good"])
    common.add_argument("--jobs", type=int, help="worker processes")
    common.add_argument("--seed", type=int)
    common.add_argument("--config", help="flat key = value file; flags win")
    common.add_argument("--out", help="write the JSON report here instead of stdout")
    common.add_argument("--ceiling", type=int, help="maximum universe size")
    common.add_argument("--no-cache", action="store_true", default=None)
    common.add_argument("-v", "--verbose", action="store_true")

    p = argparse.ArgumentParser(prog="curvecomplex", description="Exact computations with curves on punctured surfaces.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)
    sp = sub.add_parser("enumerate", parents=[common], help="build or verify a curve universe cache")
    sp.add_argument("--intersections", action="store_true", default=None, help="also store all intersection numbers")
    sp = sub.add_parser("graph", parents=[common], help="curve graph under an edge rule")
    sp.add_argument("--dot")
    sp.add_argument("--graph-json")
    for name, helptext in (("sphere", "one sphere around an origin"), ("census", "sphere and union census")):
        sp = sub.add_parser(name, parents=[common], help=helptext)
        sp.add_argument("--origin", help="coordinates, pants:i,j, first-pants or first-nonseparating")
        if name == "sphere":
            sp.add_argument("--radius", type=int)
            sp.add_argument("--dot")
        else:
            sp.add_argument("--radii", help="comma-separated radii")
    sp = sub.add_parser("classify", parents=[common], help="exhaustive predicate audits")
    sp.add_argument("--check", choices=sorted(CHECKS))
    for name in ("project", "bgit"):
        sp = sub.add_parser(name, parents=[common], help=f"subsurface {name}")
        sp.add_argument("--subsurface-from", help="multicurve c1;c2 or an origin spec for one curve")
        sp.add_argument("--component", type=int)
        if name == "project":
            sp.add_argument("--curve", help="curves to project (c1;c2); default every universe curve")
        else:
            sp.add_argument("--samples", type=int)
            sp.add_argument("--path-budget", type=int)
            sp.add_argument("--lipschitz", action="store_true", default=None)
    sp = sub.add_parser("push", parents=[common], help="outward push of sampled loops")
    sp.add_argument("--origin")
    sp.add_argument("--radius", type=int)
    sp.add_argument("--samples", type=int)
    sp.add_argument("--area-budget", type=int)
    sp.add_argument("--node-budget", type=int)
    sp.add_argument("--rewrite-budget", type=int)
    sp.add_argument("--path-budget", type=int)
    sp.add_argument("--dot", help="directory for DOT files of the disks")
    sp = sub.add_parser("fill", parents=[common], help="fill loops by disks")
    sp.add_argument("--origin")
    sp.add_argument("--loop", help="c1;c2;c3 ... (default: sampled loops in a sphere)")
    sp.add_argument("--radius", type=int)
    sp.add_argument("--samples", type=int)
    sp.add_argument("--area-budget", type=int)
    sp.add_argument("--node-budget", type=int)
    return p


def _fail(code: int, kind: str, message: str) -> int:
    sys.stderr.write(json.dumps({"error": kind, "message": message, "exit_code": code}) + "\n")
    return code


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    started = datetime.now(timezone.utc)
    t0 = time.perf_counter()
    try:
        cfg = resolve_config(args)
        u, result = COMMANDS[args.command](cfg)
        text = json.dumps(make_report(cfg, u, result, started, t0), indent=1, sort_keys=True)
        if cfg["out"]:
            _write(cfg["out"], text + "\n")
        else:
            sys.stdout.write(text + "\n")
        return 0
    except (ConfigError, SurfaceError, GraphError, ClassifyError, BudgetExceeded) as exc:
        return _fail(2, getattr(exc, "code", type(exc).__name__), str(exc))
    except OSError as exc:
        return _fail(3, "IO_ERROR", str(exc))
    except (InvariantViolation, AssertionError) as exc:
        return _fail(4, "INVARIANT_VIOLATION", str(exc))


if __name__ == "__main__":
    sys.exit(main())
