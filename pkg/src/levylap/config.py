"""Run configuration: JSON schema, validation with field paths, and object builders."""
from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass
from pathlib import Path

import jsonschema
import numpy as np

from .functionals import Constant, LfAtom, Product, SmoothCompose, ThetaAtom, outer_map
from .geometry import manifold_from_dict
from .hodge import (
    OneForm,
    ScalarForm,
    oneform_from_potentials,
    scalar_from_modes,
    sphere_coordinate,
    sphere_harmonic,
    torus_fourier,
)
from .pathspace import (
    RESOLUTION_FACTOR,
    constant_curve,
    geodesic_segment,
    random_smooth_loop,
    read_curve_csv,
    sphere_latitude,
    torus_winding,
)

__all__ = ["ConfigError", "SCHEMA", "DEFAULT_TOLERANCES", "RunConfig", "load_config", "config_hash"]


class ConfigError(ValueError):
    pass


DEFAULT_TOLERANCES = {
    "cesaro_rel": 0.02,
    "cesaro_abs": 0.05,
    "eigen_analytic": 1e-8,
    "eigen_cesaro": 0.03,
    "heat_residual": 1e-6,
    "heat_pointwise": 1e-8,
    "holonomy": 1e-6,
    "ym_theta": 1e-10,
    "u1_residual": 1e-6,
    "kernel": 1e-8,
}

_num = {"type": "number"}
_int = {"type": "integer"}
_id_list = {"type": "array", "items": {"type": "string"}}

_manifold = {
    "type": "object",
    "required": ["kind"],
    "properties": {
        "kind": {"enum": ["torus", "sphere2", "euclidean"]},
        "dim": {"type": "integer", "minimum": 1},
        "radius": {"type": "number", "exclusiveMinimum": 0},
        "periods": {"type": "array", "items": {"type": "number", "exclusiveMinimum": 0}},
    },
    "additionalProperties": False,
}

_scalar = {
    "type": "object",
    "properties": {
        "builtin": {"enum": ["torus_fourier", "sphere_harmonic", "sphere_coordinate", "modes"]},
        "k": {"type": "array", "items": _int, "minItems": 2, "maxItems": 2},
        "kind": {"enum": ["sin", "cos"]},
        "l": _int,
        "m": _int,
        "axis": {"enum": ["x", "y", "z"]},
        "amplitude": _num,
        "modes": {"type": "array", "items": {"type": "array", "minItems": 3, "maxItems": 3}},
        "terms": {"type": "array", "items": {"$ref": "#/$defs/scalar"}},
    },
    "additionalProperties": False,
}

_form = {
    "type": "object",
    "required": ["type"],
    "properties": {
        "type": {"enum": ["scalar", "oneform"]},
        "manifold": {"type": "string"},
        "truncation": {"type": "integer", "minimum": 0},
        "scalar": {"$ref": "#/$defs/scalar"},
        "exact": {"$ref": "#/$defs/scalar"},
        "coexact": {"$ref": "#/$defs/scalar"},
        "harmonic": {"type": "array", "items": _num, "maxItems": 2},
    },
    "additionalProperties": False,
}

_curve = {
    "type": "object",
    "required": ["kind"],
    "properties": {
        "kind": {"enum": ["torus_winding", "sphere_latitude", "geodesic_segment", "random_smooth_loop",
                          "constant", "csv"]},
        "manifold": {"type": "string"},
        "N": {"type": "integer", "minimum": 2},
        "p": _int,
        "q": _int,
        "base": {"type": "array", "items": _num},
        "theta0": _num,
        "phi0": _num,
        "amplitude": _num,
        "modes": {"type": "integer", "minimum": 0},
        "seed": {"type": "integer", "minimum": 0},
        "point": {"type": "array", "items": _num},
        "direction": {"type": "array", "items": _num},
        "path": {"type": "string"},
        "closed": {"type": "boolean"},
    },
    "additionalProperties": False,
}

_functional = {
    "oneOf": [
        {"type": "string"},
        {
            "type": "object",
            "required": ["op"],
            "properties": {
                "op": {"enum": ["const", "lf", "theta", "product", "compose"]},
                "value": _num,
                "form": {"type": "string"},
                "map": {"type": "string"},
                "params": {"type": "array", "items": _num},
                "children": {"type": "array", "items": {"$ref": "#/$defs/functional"}},
            },
            "additionalProperties": False,
        },
    ]
}

_scenario = {
    "type": "object",
    "required": ["id", "type"],
    "properties": {
        "id": {"type": "string", "pattern": "^[A-Za-z0-9_.-]+$"},
        "type": {"enum": ["equiv", "heat", "eigen", "holonomy", "ym-u1"]},
        "pairs": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["functional", "curve"],
                "properties": {"functional": {"type": "string"}, "curve": {"type": "string"}},
                "additionalProperties": False,
            },
        },
        "n_max": {"type": "integer", "minimum": 1},
        "h": {"type": "number", "exclusiveMinimum": 0},
        "richardson": {"type": "boolean"},
        "template": {"type": "string"},
        "form": {"type": "string"},
        "curves": _id_list,
        "t_grid": {"type": "array", "items": {"type": "number", "minimum": 0}, "minItems": 1},
        "dt": {"type": "number", "exclusiveMinimum": 0},
        "scalars": _id_list,
        "oneforms": _id_list,
        "theta0": {"type": "array", "items": _num, "minItems": 1},
        "N": {"type": "integer", "minimum": 2},
        "radius": {"type": "number", "exclusiveMinimum": 0},
        "expected_limit_gap": _num,
    },
    "additionalProperties": False,
}

SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "type": "object",
    # a single "scenario" object is accepted in place of the list
    "anyOf": [{"required": ["scenarios"]}, {"required": ["scenario"]}],
    "properties": {
        "seed": {"type": "integer", "minimum": 0, "maximum": 2**64 - 1},
        "manifold": _manifold,
        "manifolds": {"type": "object", "additionalProperties": _manifold},
        "forms": {"type": "object", "additionalProperties": _form},
        "curves": {"type": "object", "additionalProperties": _curve},
        "functionals": {"type": "object", "additionalProperties": {"$ref": "#/$defs/functional"}},
        "scenario": _scenario,
        "scenarios": {"type": "array", "items": _scenario, "minItems": 1},
        "tolerances": {"type": "object", "additionalProperties": {"type": "number", "exclusiveMinimum": 0}},
        "output": {
            "type": "object",
            "properties": {"dir": {"type": "string"}, "write_curves": {"type": "boolean"}},
            "additionalProperties": False,
        },
    },
    "additionalProperties": False,
    "$defs": {"scalar": _scalar, "functional": _functional},
}


def _path(err) -> str:
    out = "$"
    for p in err.absolute_path:
        out += f"[{p}]" if isinstance(p, int) else f".{p}"
    return out


def config_hash(raw: dict) -> str:
    return hashlib.sha256(json.dumps(raw, sort_keys=True, separators=(",", ":")).encode()).hexdigest()


@dataclass
class RunConfig:
    raw: dict
    seed: int
    tolerances: dict
    manifolds: dict
    forms: dict
    curves: dict
    functionals: dict
    scenarios: list
    sha256: str

    def form(self, fid: str, where: str):
        if fid not in self.forms:
            raise ConfigError(f"{where}: unknown form {fid!r}")
        return self.forms[fid]

    def curve(self, cid: str, where: str):
        if cid not in self.curves:
            raise ConfigError(f"{where}: unknown curve {cid!r}")
        return self.curves[cid]

    def functional(self, fid: str, where: str):
        if fid not in self.functionals:
            raise ConfigError(f"{where}: unknown functional {fid!r}")
        return self.functionals[fid]


def _scalar_from_entry(m, entry: dict, K, where: str) -> ScalarForm:
    if "terms" in entry:
        terms = [_scalar_from_entry(m, t, K, f"{where}.terms[{i}]") for i, t in enumerate(entry["terms"])]
        total = terms[0]
        for t in terms[1:]:
            total = total + t
        return total
    b = entry.get("builtin")
    amp = float(entry.get("amplitude", 1.0))
    try:
        if b == "torus_fourier":
            return torus_fourier(m, entry["k"], entry.get("kind", "sin"), amp, K)
        if b == "sphere_harmonic":
            return sphere_harmonic(m, entry["l"], entry["m"], amp, K)
        if b == "sphere_coordinate":
            return amp * sphere_coordinate(m, entry["axis"], K)
        if b == "modes":
            return scalar_from_modes(m, {tuple(k): complex(re, im) for k, re, im in entry["modes"]}, K)
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigError(f"{where}: {exc}") from exc
    raise ConfigError(f"{where}: scalar needs 'builtin' or 'terms'")


def _build_form(entry, manifolds, where):
    mid = entry.get("manifold", "default")
    if mid not in manifolds:
        raise ConfigError(f"{where}.manifold: unknown manifold {mid!r}")
    m = manifolds[mid]
    K = entry.get("truncation")
    if entry["type"] == "scalar":
        if "scalar" not in entry:
            raise ConfigError(f"{where}.scalar: required for scalar forms")
        return _scalar_from_entry(m, entry["scalar"], K, f"{where}.scalar")
    alpha = _scalar_from_entry(m, entry["exact"], K, f"{where}.exact") if "exact" in entry else None
    beta = _scalar_from_entry(m, entry["coexact"], K, f"{where}.coexact") if "coexact" in entry else None
    try:
        return oneform_from_potentials(alpha, beta, tuple(entry.get("harmonic", ())), manifold=m)
    except ValueError as exc:
        raise ConfigError(f"{where}: {exc}") from exc


def _build_curve(entry, manifolds, seed, where):
    mid = entry.get("manifold", "default")
    if entry["kind"] != "csv" and mid not in manifolds:
        raise ConfigError(f"{where}.manifold: unknown manifold {mid!r}")
    m = manifolds.get(mid)
    N = int(entry.get("N", 1024))
    amp = float(entry.get("amplitude", 0.0))
    modes = int(entry.get("modes", 3))
    cseed = int(entry.get("seed", seed))
    k = entry["kind"]
    try:
        if k == "torus_winding":
            return torus_winding(m, int(entry.get("p", 0)), int(entry.get("q", 1)), N=N,
                                 base=tuple(entry.get("base", (0.0,) * m.dim)), amplitude=amp, modes=modes, seed=cseed)
        if k == "sphere_latitude":
            return sphere_latitude(m, float(entry["theta0"]), N=N, amplitude=amp, modes=modes, seed=cseed,
                                   phi0=float(entry.get("phi0", 0.0)))
        if k == "geodesic_segment":
            return geodesic_segment(m, np.asarray(entry["point"], float), np.asarray(entry["direction"], float), N=N)
        if k == "random_smooth_loop":
            return random_smooth_loop(m, cseed, modes=max(modes, 1), N=N, amplitude=amp or 0.2)
        if k == "constant":
            return constant_curve(m, np.asarray(entry["point"], float), N=N, closed=bool(entry.get("closed", True)))
        if k == "csv":
            return read_curve_csv(entry["path"])
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigError(f"{where}: {exc}") from exc
    raise ConfigError(f"{where}.kind: unsupported curve kind {k!r}")


def _build_functional(entry, forms, named, where, stack=()):
    if isinstance(entry, str):
        if entry in stack:
            raise ConfigError(f"{where}: functional reference cycle through {entry!r}")
        if entry not in named:
            raise ConfigError(f"{where}: unknown functional {entry!r}")
        return _build_functional(named[entry], forms, named, f"$.functionals.{entry}", stack + (entry,))
    op = entry["op"]
    try:
        if op == "const":
            return Constant(entry.get("value", 1.0))
        if op in ("lf", "theta"):
            fid = entry.get("form")
            if fid not in forms:
                raise ConfigError(f"{where}.form: unknown form {fid!r}")
            f = forms[fid]
            if op == "lf" and not isinstance(f, ScalarForm):
                raise ConfigError(f"{where}.form: 'lf' needs a scalar form")
            if op == "theta" and not isinstance(f, OneForm):
                raise ConfigError(f"{where}.form: 'theta' needs a 1-form")
            return LfAtom(f) if op == "lf" else ThetaAtom(f)
        kids = tuple(_build_functional(ch, forms, named, f"{where}.children[{i}]", stack)
                     for i, ch in enumerate(entry.get("children", [])))
        if op == "product":
            return Product(kids)
        return SmoothCompose(outer_map(entry.get("map", "power"), *entry.get("params", [])), kids)
    except ConfigError:
        raise
    except ValueError as exc:
        raise ConfigError(f"{where}: {exc}") from exc


def _guards(cfg: RunConfig):
    for i, sc in enumerate(cfg.scenarios):
        where = f"$.scenarios[{i}]"
        if sc["type"] in ("equiv", "eigen"):
            n_max = int(sc.get("n_max", 32))
            cids = [p["curve"] for p in sc.get("pairs", [])] + list(sc.get("curves", []))
            for cid in cids:
                c = cfg.curve(cid, where)
                if RESOLUTION_FACTOR * n_max > c.N:
                    raise ConfigError(
                        f"{where}.n_max: n_max={n_max} violates N >= {RESOLUTION_FACTOR}*n_max "
                        f"for curve {cid!r} (N={c.N}); raise N to {RESOLUTION_FACTOR * n_max} or lower n_max"
                    )


def load_config(source, seed_override: int | None = None) -> RunConfig:
    """Parse, validate and build everything a run needs.  Raises ConfigError with a field path."""
    if isinstance(source, (str, Path)):
        try:
            raw = json.loads(Path(source).read_text())
        except json.JSONDecodeError as exc:
            raise ConfigError(f"{source}: invalid JSON ({exc})") from exc
    else:
        raw = source
    validator = jsonschema.Draft202012Validator(SCHEMA)
    errors = sorted(validator.iter_errors(raw), key=lambda e: list(e.absolute_path))
    if errors:
        raise ConfigError("; ".join(f"{_path(e)}: {e.message}" for e in errors[:5]))
    seed = int(raw.get("seed", 0) if seed_override is None else seed_override)
    manifolds = {k: manifold_from_dict(v) for k, v in raw.get("manifolds", {}).items()}
    if "manifold" in raw:
        manifolds["default"] = manifold_from_dict(raw["manifold"])
    forms = {k: _build_form(v, manifolds, f"$.forms.{k}") for k, v in raw.get("forms", {}).items()}
    curves = {k: _build_curve(v, manifolds, seed, f"$.curves.{k}") for k, v in raw.get("curves", {}).items()}
    named = raw.get("functionals", {})
    functionals = {k: _build_functional(v, forms, named, f"$.functionals.{k}", (k,)) for k, v in named.items()}
    scenarios = list(raw.get("scenarios", [])) + ([raw["scenario"]] if "scenario" in raw else [])
    ids = [s["id"] for s in scenarios]
    dup = {i for i in ids if ids.count(i) > 1}
    if dup:
        raise ConfigError(f"$.scenarios: duplicate scenario ids {sorted(dup)}")
    tol = dict(DEFAULT_TOLERANCES)
    tol.update(raw.get("tolerances", {}))
    cfg = RunConfig(raw, seed, tol, manifolds, forms, curves, functionals, scenarios, config_hash(raw))
    _guards(cfg)
    return cfg
