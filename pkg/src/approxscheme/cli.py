"""Batch command-line entry point.

Every command writes a JSON document ``{"payload": ..., "metadata": ...}``
(timestamps live only in ``metadata``) or a CSV table with 17 significant
digits. Exit codes: 0 success, 1 computation failure, 2 configuration error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
from dataclasses import dataclass, field
from datetime import datetime, timezone

import numpy as np

from . import analysis, fixtures, lethargy
from .bestapprox import error_profile
from .errors import ApproxError
from .schemes import Dictionary, Scheme, linear_chain, nterm_scheme, poly_grid_scheme, validate_scheme
from .spaces import INF, Space, as_vector, lp_norm

SEED_ENV = "APPROXSCHEME_SEED"
COMMANDS = ("errors", "farness", "construct", "shapiro-check", "verify", "fixtures")


class ConfigError(Exception):
    """Invalid or unreadable run configuration (exit code 2)."""


@dataclass
class RunConfig:
    command: str
    fixture: str | None = None
    scheme_file: str | None = None
    p: float = 2.0
    eps: list[float] | None = None
    J: int | None = None
    c: float = 0.6
    M: int = 10
    n_max: int | None = None
    levels: list[int] | None = None
    horizon: int | None = None
    seed: int = 0
    method: str | None = None
    x: list[float] | None = None
    witness: str | None = None
    tol: float = 1e-8
    out: str | None = None
    fmt: str = "json"
    extra: dict = field(default_factory=dict)

    def describe(self) -> dict:
        d = {k: v for k, v in self.__dict__.items() if k not in ("out", "extra") and v is not None}
        d.update(self.extra)
        return d


# -- parsing ----------------------------------------------------------------

def _float_list(text: str) -> list[float]:
    try:
        return [float(t) for t in text.split(",") if t.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from exc


def _levels(text: str) -> list[int]:
    try:
        if ".." in text:
            lo, hi = text.split("..")
            return list(range(int(lo), int(hi) + 1))
        return [int(t) for t in text.split(",") if t.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected a range like 0..7 or a list, got {text!r}") from exc


def _exponent(text: str) -> float:
    if text.lower() in ("inf", "infinity"):
        return INF
    return float(text)


def _default_seed() -> int:
    raw = os.environ.get(SEED_ENV)
    if raw is None:
        return 0
    try:
        return int(raw)
    except ValueError:
        raise ConfigError(f"{SEED_ENV}={raw!r} is not an integer") from None


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="approxscheme", description=__doc__.splitlines()[0])
    parser.add_argument("command", choices=COMMANDS)
    src = parser.add_mutually_exclusive_group()
    src.add_argument("--fixture", choices=sorted(fixtures.REGISTRY))
    src.add_argument("--scheme", dest="scheme_file", help="JSON scheme document")
    parser.add_argument("--p", type=_exponent, default=2.0)
    parser.add_argument("--eps", type=_float_list)
    parser.add_argument("--J", type=int)
    parser.add_argument("--c", type=float, default=0.6)
    parser.add_argument("--M", type=int, default=10)
    parser.add_argument("--n-max", type=int)
    parser.add_argument("--n", dest="levels", type=_levels)
    parser.add_argument("--horizon", type=int)
    parser.add_argument("--seed", type=int)
    parser.add_argument("--method")
    parser.add_argument("--x", type=_float_list, help="element to analyse (comma-separated)")
    parser.add_argument("--witness", help="JSON output of a construct run to verify")
    parser.add_argument("--tol", type=float, default=1e-8)
    parser.add_argument("--series-c", type=float)
    parser.add_argument("--variant", default="normalized")
    parser.add_argument("--grid", type=int)
    parser.add_argument("--out")
    parser.add_argument("--format", dest="fmt", choices=("json", "csv"), default="json")
    return parser


def parse_config(argv) -> RunConfig:
    ns = build_parser().parse_args(argv)
    seed = ns.seed if ns.seed is not None else _default_seed()
    extra = {k: getattr(ns, k) for k in ("series_c", "variant", "grid") if getattr(ns, k) is not None}
    return RunConfig(ns.command, ns.fixture, ns.scheme_file, ns.p, ns.eps, ns.J, ns.c, ns.M, ns.n_max,
                     ns.levels, ns.horizon, seed, ns.method, ns.x, ns.witness, ns.tol, ns.out, ns.fmt, extra)


# -- problem assembly -------------------------------------------------------

@dataclass
class Problem:
    space: Space
    scheme: Scheme
    Y_basis: np.ndarray | None
    x: np.ndarray | None
    fixture: fixtures.Fixture | None = None


def _read_json(path: str) -> dict:
    if not os.path.exists(path):
        raise ConfigError(f"file not found: {path}")
    try:
        with open(path) as fh:
            return json.load(fh)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: invalid JSON ({exc})") from exc


def _matrix(rows, dim: int) -> np.ndarray:
    m = np.asarray(rows, dtype=float)
    if m.size == 0:
        return np.zeros((dim, 0))
    if m.ndim != 2 or m.shape[0] != dim:
        raise ConfigError(f"matrix of shape {m.shape} does not have {dim} rows")
    return m


def scheme_from_document(doc: dict) -> tuple[Space, Scheme, np.ndarray | None, np.ndarray | None]:
    """Build space, scheme, subspace basis and element from a scheme document."""
    if "payload" in doc and "space" not in doc:
        doc = doc["payload"]
    try:
        space = Space.from_dict(doc["space"])
        sd = doc["scheme"]
        kind = sd.get("kind", "linear-chain")
        k = sd.get("k_map", "identity")
        if kind == "poly-grid":
            scheme = poly_grid_scheme(space, int(sd["n_max"]))
        elif kind == "nterm-dictionary":
            atoms = _matrix(sd["atoms"], space.dim)
            d = Dictionary(atoms, bool(sd.get("orthonormal", False)))
            scheme = nterm_scheme(space, d, int(sd["n_max"]), k_map=k if k != "identity" else "double")
        else:
            bases = [_matrix(b, space.dim) for b in sd["bases"]]
            scheme = linear_chain(space, bases, k_map=k, kind=kind)
        Y = doc.get("subspace", {}).get("basis")
        Y = None if Y is None else _matrix(Y, space.dim)
        x = doc.get("x")
        x = None if x is None else as_vector(x, space.dim)
    except (KeyError, TypeError) as exc:
        raise ConfigError(f"malformed scheme document: missing or invalid {exc}") from exc
    except ValueError as exc:
        raise ConfigError(f"invalid scheme document: {exc}") from exc
    return space, scheme, Y, x


def scheme_to_document(fx: fixtures.Fixture, x=None) -> dict:
    s = fx.scheme
    sd: dict = {"kind": s.kind, "k_map": s.k_map_kind if s.k_table is None else list(s.k_table)}
    if s.kind == "poly-grid":
        sd["n_max"] = s.n_max
    elif s.kind == "nterm-dictionary":
        sd.update(atoms=s.dictionary.atoms.tolist(), orthonormal=s.dictionary.orthonormal, n_max=s.n_max)
    else:
        sd["bases"] = [b.tolist() for b in s.bases]
    doc = {"space": fx.space.to_dict(), "scheme": sd, "subspace": {"basis": fx.Y_basis.tolist()}}
    if x is not None:
        doc["x"] = np.asarray(x).tolist()
    return doc


def _fixture(cfg: RunConfig) -> fixtures.Fixture:
    name = cfg.fixture
    if name == "slow-lp":
        eps = cfg.eps or [1.0, 0.5, 0.25, 0.125, 0.0625]
        J = cfg.J if cfg.J is not None else max(4, (cfg.horizon or 0) + 1)
        return fixtures.gen_slow_scheme(cfg.p, eps, J)
    if name == "cfar":
        default = 16 if cfg.command == "construct" else 8
        n_max = cfg.n_max or (len(cfg.eps) - 1 if cfg.eps else default)
        return fixtures.gen_cfar(cfg.c, n_max)
    if name == "projected":
        return fixtures.gen_projected_counterexample(cfg.M, cfg.extra.get("variant", "normalized"))
    if name == "muntz":
        return fixtures.gen_muntz_grid(n_max=cfg.n_max, grid_size=cfg.extra.get("grid", 1024))
    if name == "chebyshev":
        return fixtures.gen_chebyshev(grid_size=cfg.extra.get("grid", 4096))
    raise ConfigError(f"unknown fixture {name!r}")


def _default_x(fx: fixtures.Fixture) -> np.ndarray:
    if "x" in fx.extras:
        return np.asarray(fx.extras["x"])
    y = fx.Y_basis[:, 0]
    return y / lp_norm(y, fx.space.p)


def load_problem(cfg: RunConfig) -> Problem:
    if cfg.scheme_file:
        space, scheme, Y, x = scheme_from_document(_read_json(cfg.scheme_file))
        fx = None
    elif cfg.fixture:
        try:
            fx = _fixture(cfg)
        except ValueError as exc:
            raise ConfigError(f"fixture {cfg.fixture}: {exc}") from exc
        space, scheme, Y, x = fx.space, fx.scheme, fx.Y_basis, _default_x(fx)
    else:
        raise ConfigError("give --fixture or --scheme")
    if cfg.x is not None:
        try:
            x = as_vector(cfg.x, space.dim)
        except ValueError as exc:
            raise ConfigError(f"--x: {exc}") from exc
    return Problem(space, scheme, Y, x, fx)


def _levels_for(cfg: RunConfig, scheme: Scheme) -> list[int]:
    levels = cfg.levels if cfg.levels is not None else list(range(scheme.n_max + 1))
    bad = [n for n in levels if not 0 <= n <= scheme.n_max]
    if bad:
        raise ConfigError(f"levels {bad} outside 0..{scheme.n_max}")
    return levels


# -- commands ---------------------------------------------------------------

def _profile_rows(profile) -> list[dict]:
    return [{"n": e.n, "error": e.error, "status": e.status} for e in profile.entries]


def cmd_errors(cfg: RunConfig, pr: Problem) -> tuple[dict, list[dict], list[str]]:
    if pr.x is None:
        raise ConfigError("errors needs an element: give --x or a document with \"x\"")
    prof = error_profile(pr.space, pr.x, pr.scheme, _levels_for(cfg, pr.scheme), seed=cfg.seed)
    rows = _profile_rows(prof)
    return {"x": pr.x, "profile": rows}, rows, ["n", "error", "status"]


def cmd_farness(cfg: RunConfig, pr: Problem):
    if pr.Y_basis is None:
        raise ConfigError("farness needs a subspace basis")
    try:
        rep = analysis.farness_report(pr.space, pr.Y_basis, pr.scheme, _levels_for(cfg, pr.scheme),
                                      method=cfg.method, seed=cfg.seed)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    rows = rep.to_rows()
    return {"farness": rows, "infimum": rep.infimum, "horizon": rep.horizon}, rows, ["n", "value", "status"]


def cmd_construct(cfg: RunConfig, pr: Problem):
    method = cfg.method or ("series" if cfg.fixture == "cfar" else "bernstein")
    if method == "series":
        if pr.fixture is None or pr.fixture.far_witness is None:
            raise ConfigError("series construction needs a fixture with a far-witness callback (cfar)")
        eps = cfg.eps or [2.0**-n for n in range(pr.scheme.n_max + 1)]
        c = cfg.extra.get("series_c", 0.99 * cfg.c * pr.fixture.extras["theta"])
        J = cfg.J if cfg.J is not None else 3
        res = lethargy.series_construct(pr.space, pr.scheme, pr.fixture.far_witness, c, eps, J)
    elif method == "bernstein":
        if pr.Y_basis is None:
            raise ConfigError("bernstein construction needs a subspace basis")
        eps = cfg.eps
        if eps is None:
            if pr.fixture is not None and "profile" in pr.fixture.expected:
                eps = pr.fixture.expected["profile"]
            else:
                raise ConfigError("give --eps")
        res = lethargy.bernstein_construct(pr.space, pr.scheme, pr.Y_basis, eps, cfg.horizon, seed=cfg.seed)
    else:
        raise ConfigError(f"unknown construction method {method!r}")
    rows = _profile_rows(res.profile)
    payload = {"method": method, "y": res.y, "profile": rows, "certificates": res.certificates,
               "all_certified": res.all_certified, "construction_log": res.construction_log}
    return payload, rows, ["n", "error", "status"]


def cmd_shapiro(cfg: RunConfig, pr: Problem):
    diag = analysis.shapiro_check(pr.space, pr.scheme, _levels_for(cfg, pr.scheme),
                                  c_threshold=cfg.extra.get("series_c", 1.0), seed=cfg.seed)
    rows = [{"n": n, "value": v, "status": s}
            for n, v, s in zip(diag.levels, diag.sphere_values, diag.sphere_statuses)]
    return diag.to_dict(), rows, ["n", "value", "status"]


def cmd_verify(cfg: RunConfig, pr: Problem):
    if cfg.witness:
        doc = _read_json(cfg.witness)
        try:
            y = as_vector(doc["payload"]["y"], pr.space.dim)
        except (KeyError, TypeError) as exc:
            raise ConfigError(f"{cfg.witness}: no payload.y") from exc
        except ValueError as exc:
            raise ConfigError(f"{cfg.witness}: {exc}") from exc
    elif pr.x is not None:
        y = pr.x
    else:
        raise ConfigError("verify needs --witness, --x or a document with \"x\"")
    if cfg.eps is None:
        raise ConfigError("verify needs --eps")
    rep = lethargy.verify_witness(pr.space, pr.scheme, y, cfg.eps, cfg.tol, cfg.levels)
    rows = [{"n": n, "error": e, "status": "pass" if ok else "fail"}
            for n, e, ok in zip(rep.levels, rep.errors, rep.passed)]
    return rep.to_dict(), rows, ["n", "error", "status"]


def cmd_fixtures(cfg: RunConfig, pr: Problem | None):
    if pr is None:
        rows = [{"name": k, "doc": (fn.__doc__ or "").strip().splitlines()[0]} for k, fn in sorted(fixtures.REGISTRY.items())]
        return {"fixtures": rows}, rows, ["name", "doc"]
    fx = pr.fixture
    doc = scheme_to_document(fx, pr.x)
    doc["expected"] = fx.expected
    doc["validation"] = validate_scheme(fx.scheme, seed=cfg.seed).to_dict()
    rows = [{"n": n, "value": d, "status": "dim"} for n, d in enumerate(fx.scheme.dims())]
    return doc, rows, ["n", "value", "status"]


HANDLERS = {
    "errors": cmd_errors,
    "farness": cmd_farness,
    "construct": cmd_construct,
    "shapiro-check": cmd_shapiro,
    "verify": cmd_verify,
    "fixtures": cmd_fixtures,
}


# -- serialization ----------------------------------------------------------

def _plain(obj):
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _plain(obj.tolist())
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, (np.integer, int)):
        return int(obj)
    if isinstance(obj, (np.floating, float)):
        v = float(obj)
        if math.isinf(v):
            return "inf" if v > 0 else "-inf"
        if math.isnan(v):
            return None
        return v
    return obj


def format_number(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return str(bool(v)).lower()
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return format(float(v), ".17g")
    return str(v)


def render_json(payload: dict) -> str:
    doc = {"payload": _plain(payload),
           "metadata": {"timestamp": datetime.now(timezone.utc).isoformat(), "program": "approxscheme"}}
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def render_csv(rows: list[dict], header: list[str], cfg: RunConfig) -> str:
    buf = io.StringIO()
    buf.write(f"# command={cfg.command} seed={cfg.seed}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([format_number(r[h]) for h in header])
    return buf.getvalue()


def _emit(text: str, out: str | None):
    if out:
        with open(out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def run(cfg: RunConfig) -> int:
    """Execute one configured command; returns the process exit code."""
    try:
        if cfg.command == "fixtures" and not (cfg.fixture or cfg.scheme_file):
            pr = None
        else:
            pr = load_problem(cfg)
        payload, rows, header = HANDLERS[cfg.command](cfg, pr)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except ApproxError as exc:
        print(f"error: {exc}", file=sys.stderr)
        if cfg.out and cfg.fmt == "json":
            _emit(render_json({"command": cfg.command, "config": cfg.describe(), "seed": cfg.seed,
                               "error": {"type": type(exc).__name__, "op": exc.op, "level": exc.level,
                                         "message": str(exc)}}), cfg.out)
        return 1
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    if cfg.fmt == "csv":
        text = render_csv(rows, header, cfg)
    else:
        payload = {"command": cfg.command, "config": cfg.describe(), "seed": cfg.seed, **payload}
        text = render_json(payload)
    _emit(text, cfg.out)
    return 0


def main(argv=None) -> int:
    try:
        cfg = parse_config(sys.argv[1:] if argv is None else argv)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return run(cfg)
