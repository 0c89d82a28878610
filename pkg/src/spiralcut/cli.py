"""Command-line frontend: ``spiralcut {gen,spiral,unfold,validate,experiment,annuli}``.

Exit codes: 0 success or simple, 3 overlap (or failed nesting) detected,
2 usage error, 4 I/O error, 5 internal invariant violation.
"""
from __future__ import annotations

import argparse
import json
import logging
import sys
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np

from . import experiments as ex
from . import fileio
from .errors import GeneratorError, MeshError, SpiralCutError
from .generators import ProfileCurve, default_profile, from_spec, peanut_profile
from .mesh import Polyhedron, axis_angle_rotation, orient, random_rotation
from .overlap import annulus_fit, brute_force_crossings, check_simple
from .spiral import build_spiral, validate_spiral
from .svg import SvgStyle, curve_svg, layout_svg
from .unfold import angle_closure_error, glue_check, isometry_error, side_length_error, unfold

log = logging.getLogger("spiralcut")

EXIT_OK, EXIT_USAGE, EXIT_OVERLAP, EXIT_IO, EXIT_INTERNAL = 0, 2, 3, 4, 5
EXPERIMENTS = ("random-overlap", "hemiball-sweep", "revolution-threshold", "dome-conjecture")
INVARIANT_TOL = 1e-9


class UsageError(Exception):
    pass


class InputError(Exception):
    pass


@dataclass
class RunConfig:
    command: str
    input: Optional[str] = None
    gen: Optional[str] = None
    out: Optional[str] = None
    rotate: str = "none"
    winding: int = 0
    tol_height: Optional[float] = None
    seed: int = 0
    svg: Optional[str] = None
    json: Optional[str] = None
    csv: Optional[str] = None
    name: Optional[str] = None  # experiment name or generator spec for ``gen``
    n: str = "4,8,12,16,20,25"
    trials: int = 50
    nspin: str = "4,6,8,12,20"
    profile: Optional[str] = None
    orientations: int = 100
    frequency: int = 3
    perturb: float = 0.01
    workers: int = 1
    dots: bool = True
    rho_color: str = "purple"
    lambda_color: str = "green"
    vertex_color: str = "red"
    extra: dict = field(default_factory=dict)

    def style(self) -> SvgStyle:
        return SvgStyle(rho_color=self.rho_color, lambda_color=self.lambda_color,
                        vertex_color=self.vertex_color, show_vertices=self.dots)


# ---------------------------------------------------------------------------
# parsing

def parse_int_list(text: str) -> list:
    try:
        return [int(t) for t in str(text).replace(" ", "").split(",") if t]
    except ValueError:
        raise UsageError(f"expected a comma-separated integer list, got {text!r}") from None


def parse_rotation(text: Optional[str]) -> np.ndarray:
    """``none``, ``random:<seed>`` or ``axis:x,y,z:degrees``."""
    if text is None or text.strip().lower() in ("", "none"):
        return np.eye(3)
    kind, _, rest = text.strip().partition(":")
    try:
        if kind == "random":
            return random_rotation(np.random.default_rng(int(rest)))
        if kind == "axis":
            axis, _, deg = rest.partition(":")
            v = [float(t) for t in axis.strip("()").split(",")]
            if len(v) != 3:
                raise ValueError
            return axis_angle_rotation(v, np.radians(float(deg)))
    except (ValueError, MeshError):
        pass
    raise UsageError(f"bad --rotate value {text!r}; use none, random:<seed> or axis:x,y,z:deg")


def read_config(path) -> dict:
    """``key = value`` lines; ``#`` starts a comment."""
    out = {}
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise InputError(f"cannot read config {path}: {exc.strerror}") from None
    for num, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        key, eq, value = line.partition("=")
        if not eq:
            raise UsageError(f"{path}:{num}: expected key=value")
        out[key.strip().replace("-", "_")] = value.strip()
    return out


def _add_common(sp, mesh_input=True):
    if mesh_input:
        sp.add_argument("-i", "--in", dest="input", help="OFF/OBJ mesh, or - for OFF on stdin")
        sp.add_argument("--gen", help="generator spec such as cube or hemiball:n=16")
        sp.add_argument("--rotate", help="none, random:<seed> or axis:x,y,z:deg")
        sp.add_argument("--winding", type=int)
        sp.add_argument("--tol-height", dest="tol_height", type=float)
    sp.add_argument("-o", "--out")
    sp.add_argument("--seed", type=int)
    sp.add_argument("--svg")
    sp.add_argument("--json")
    sp.add_argument("--config", help="key=value file; flags override it")
    sp.add_argument("-v", "--verbose", action="store_true", default=None)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="spiralcut", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)
    g = sub.add_parser("gen", help="write a generated polyhedron as OFF/OBJ")
    g.add_argument("name", nargs="?", help="generator spec")
    g.add_argument("--rotate")
    _add_common(g, mesh_input=False)
    for cmd, hlp in (("spiral", "build the spiral cut-path"),
                     ("unfold", "cut, develop and test for overlap"),
                     ("validate", "check the spiral and layout invariants")):
        _add_common(sub.add_parser(cmd, help=hlp))
    a = sub.add_parser("annuli", help="annulus fit of an unfolded polyhedron of revolution")
    _add_common(a)
    e = sub.add_parser("experiment", help="run a seeded experiment")
    e.add_argument("name", nargs="?", help="|".join(EXPERIMENTS))
    e.add_argument("--n")
    e.add_argument("--trials", type=int)
    e.add_argument("--nspin")
    e.add_argument("--profile")
    e.add_argument("--orientations", type=int)
    e.add_argument("--frequency", type=int)
    e.add_argument("--perturb", type=float)
    e.add_argument("--workers", type=int)
    e.add_argument("--csv")
    e.add_argument("--winding", type=int)
    _add_common(e, mesh_input=False)
    return ap


def _coerce(value: str, default):
    if isinstance(default, bool):
        if value.lower() in ("1", "true", "yes", "on"):
            return True
        if value.lower() in ("0", "false", "no", "off"):
            return False
        raise UsageError(f"expected a boolean, got {value!r}")
    if isinstance(default, int):
        return int(value)
    if isinstance(default, float):
        return float(value)
    return value


def make_config(argv) -> RunConfig:
    ap = build_parser()
    try:
        ns = ap.parse_args(argv)
    except SystemExit as exc:
        raise UsageError("invalid arguments") if exc.code else exc
    cfg = RunConfig(command=ns.command)
    known = {f for f in RunConfig.__dataclass_fields__ if f not in ("command", "extra")}
    if getattr(ns, "config", None):
        for key, value in read_config(ns.config).items():
            if key == "tol_height":
                cfg.tol_height = float(value)
                continue
            if key not in known:
                raise UsageError(f"unknown config key {key!r}")
            try:
                setattr(cfg, key, _coerce(value, getattr(cfg, key)))
            except ValueError:
                raise UsageError(f"bad value for {key}: {value!r}") from None
    for key, value in vars(ns).items():
        if key in known and value is not None:
            setattr(cfg, key, value)
    cfg.extra["verbose"] = bool(getattr(ns, "verbose", False))
    if cfg.winding < 0:
        raise UsageError("--winding must be >= 0")
    return cfg


# ---------------------------------------------------------------------------
# helpers

def load_polyhedron(cfg: RunConfig) -> Polyhedron:
    if cfg.input and cfg.gen:
        raise UsageError("give either --in or --gen, not both")
    if cfg.gen:
        try:
            p = from_spec(cfg.gen)
        except (ValueError, GeneratorError) as exc:
            raise UsageError(str(exc)) from None
    elif cfg.input == "-":
        V, faces = fileio.parse_off(sys.stdin.read())
        p = fileio.from_polygons(V, faces, name="stdin")
    elif cfg.input:
        path = Path(cfg.input)
        if not path.is_file():
            raise InputError(f"no such mesh file: {path}")
        try:
            p = fileio.read_mesh(path)
        except (ValueError, IndexError) as exc:
            raise InputError(f"cannot parse {path}: {exc}") from None
    else:
        raise UsageError("no input: use --in FILE or --gen SPEC")
    return orient(p, parse_rotation(cfg.rotate))


def write_text(path: Optional[str], text: str):
    if not path:
        return
    if path == "-":
        sys.stdout.write(text)
        return
    try:
        Path(path).write_text(text)
    except OSError as exc:
        raise InputError(f"cannot write {path}: {exc.strerror}") from None


def dump_json(path: Optional[str], obj):
    if path:
        write_text(path, json.dumps(obj, indent=1, sort_keys=True) + "\n")


def _pipeline(cfg: RunConfig):
    p = load_polyhedron(cfg)
    s = build_spiral(p, cfg.winding, cfg.tol_height)
    return p, s, unfold(p, s)


# ---------------------------------------------------------------------------
# commands

def cmd_gen(cfg: RunConfig) -> int:
    if not cfg.name:
        raise UsageError("gen needs a generator spec, e.g. 'spiralcut gen cube'")
    cfg.gen = cfg.name
    p = load_polyhedron(cfg)
    out = cfg.out or "-"
    text = fileio.obj_text(p) if out.lower().endswith(".obj") else fileio.off_text(p)
    write_text(out, text)
    return EXIT_OK


def cmd_spiral(cfg: RunConfig) -> int:
    p = load_polyhedron(cfg)
    s = build_spiral(p, cfg.winding, cfg.tol_height)
    out = dict(s.to_json(), validation=validate_spiral(p, s, cfg.tol_height).to_json())
    dump_json(cfg.json or cfg.out or "-", out)
    return EXIT_OK


def cmd_unfold(cfg: RunConfig) -> int:
    p, s, lay = _pipeline(cfg)
    rep = check_simple(lay)
    dump_json(cfg.json, {"layout": lay.to_json(), "overlap": rep.to_json(), "spiral": s.to_json()})
    dump_json(cfg.out, rep.to_json())
    write_text(cfg.svg, layout_svg(lay, cfg.style(), [c[2] for c in rep.crossings]))
    print(f"{p.name}: {'simple' if rep.simple else 'overlap'} "
          f"({len(rep.crossings)} crossing pairs, {len(s.corners)} corners)")
    return EXIT_OK if rep.simple else EXIT_OVERLAP


def cmd_validate(cfg: RunConfig) -> int:
    p, s, lay = _pipeline(cfg)
    v = validate_spiral(p, s, cfg.tol_height)
    rep = check_simple(lay)
    checks = {"isometry": isometry_error(lay), "sides": side_length_error(lay),
              "angle_closure": angle_closure_error(lay)}
    oracle = brute_force_crossings(lay)
    result = {"spiral": v.to_json(), "invariants": checks, "glue": glue_check(lay),
              "simple": rep.simple, "oracle_agrees": oracle == rep.pairs()}
    dump_json(cfg.json or cfg.out, result)
    ok = v.ok and all(x <= INVARIANT_TOL for x in checks.values()) and result["glue"] \
        and result["oracle_agrees"]
    print(f"{p.name}: spiral {'ok' if v.ok else 'INVALID'}, invariants "
          f"{'ok' if ok else 'FAILED'}, {'simple' if rep.simple else 'overlap'}")
    if not ok:
        return EXIT_INTERNAL
    return EXIT_OK if rep.simple else EXIT_OVERLAP


def _level_of(lay, s) -> list:
    out = []
    for c in lay.corner_index:
        tag = s.tags[c] if c >= 0 else None
        out.append(tag[1] if tag and tag[0] == "level" and s.corners[c].is_vertex else None)
    return out


def cmd_annuli(cfg: RunConfig) -> int:
    p, s, lay = _pipeline(cfg)
    fit = annulus_fit(lay, _level_of(lay, s))
    dump_json(cfg.json or cfg.out or "-", fit.to_json())
    return EXIT_OK if fit.nested else EXIT_OVERLAP


def _profile(cfg: RunConfig) -> ProfileCurve:
    if cfg.profile in (None, "cstar", "cstar.txt"):
        return default_profile()
    if cfg.profile in ("peanut", "peanut.txt"):
        return peanut_profile()
    path = Path(cfg.profile)
    if not path.is_file():
        raise InputError(f"no such profile file: {path}")
    return ProfileCurve.load(path)


def _sweep_csv(n: int, res) -> str:
    counted = len(res.counted)
    return ("n,trials,overlap_fraction,excluded\n"
            f"{n},{counted},{res.overlap_fraction!r},{res.excluded}\n")


def cmd_experiment(cfg: RunConfig) -> int:
    name = cfg.name
    if name not in EXPERIMENTS:
        raise UsageError(f"unknown experiment {name!r}; choose from {', '.join(EXPERIMENTS)}")
    if cfg.trials < 1 or cfg.orientations < 0:
        raise UsageError("--trials must be >= 1 and --orientations >= 0")
    if name == "random-overlap":
        res = ex.random_overlap_stats(parse_int_list(cfg.n), cfg.trials, cfg.seed,
                                      cfg.winding, cfg.workers)
        csv_text = res.to_csv()
        write_text(cfg.svg, curve_svg(res.ns, res.fractions, None))
        summary = ", ".join(f"n={r.n}: {r.overlap_fraction:.3f}" for r in res.rows)
    elif name == "hemiball-sweep":
        n = parse_int_list(cfg.n)[0] if cfg.n != RunConfig.n else 16
        res = ex.hemiball_orientation_sweep(n, cfg.orientations, cfg.seed, cfg.winding)
        csv_text = _sweep_csv(n, res)
        summary = f"H_{n}: overlap fraction {res.overlap_fraction:.3f}"
    elif name == "dome-conjecture":
        orients = cfg.orientations if cfg.orientations != RunConfig.orientations else 25
        res = ex.dome_conjecture_run(cfg.frequency, cfg.perturb, orients, cfg.seed, cfg.winding)
        csv_text = _sweep_csv(cfg.frequency, res)
        summary = f"dome f={cfg.frequency}: overlap fraction {res.overlap_fraction:.3f}"
    else:
        res = ex.revolution_threshold_search(_profile(cfg), parse_int_list(cfg.nspin))
        csv_text = "n_spin,simple\n" + "".join(f"{k},{int(v)}\n" for k, v in res.verdicts.items())
        summary = f"n0={res.n0}, persists={res.persists}"
    dump_json(cfg.json or cfg.out, res.to_json())
    write_text(cfg.csv, csv_text)
    print(f"{name}: {summary}")
    return EXIT_OK


COMMANDS = {"gen": cmd_gen, "spiral": cmd_spiral, "unfold": cmd_unfold,
            "validate": cmd_validate, "annuli": cmd_annuli, "experiment": cmd_experiment}


def main(argv=None) -> int:
    try:
        cfg = make_config(sys.argv[1:] if argv is None else argv)
    except UsageError as exc:
        print(f"spiralcut: usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except InputError as exc:
        print(f"spiralcut: {exc}", file=sys.stderr)
        return EXIT_IO
    logging.basicConfig(level=logging.INFO if cfg.extra.get("verbose") else logging.ERROR,
                        format="%(name)s: %(message)s")
    try:
        return COMMANDS[cfg.command](cfg)
    except UsageError as exc:
        print(f"spiralcut: usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except InputError as exc:
        print(f"spiralcut: {exc}", file=sys.stderr)
        return EXIT_IO
    except SpiralCutError as exc:
        print(f"spiralcut: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
