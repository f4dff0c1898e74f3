"""Run configuration: YAML parsing, schema checking, spec construction.

The config is plain YAML (key-value with nested lists). Unknown keys are
rejected everywhere so typos fail loudly instead of being ignored. The full
schema is documented in the README; the essentials:

    grid:   {dims: [20, 20]}
    sets:   list of constraint entries (label, target, transform, kind,
            parameters)
    solver: ADMM option overrides
    spg:    outer-solver option overrides
    datafit / objective / video / sample / generate: per-command sections
    input:  path of the model grid file
    seed:   integer controlling all synthetic randomness
"""

import os

import numpy as np
import yaml

from .admm import ADMMOptions
from .fileio import read_grid, read_sparse_operator
from .grid import ModelGrid
from .operators import Transform
from .sets import (box, cardinality, fixed, l1_ball, l2_annulus, l2_ball,
                   rank_limit, subspace)
from .spec import MinkowskiSpec, SetDescriptor, validate
from .spg import SPGOptions
from .video import frame_partition


class ConfigError(ValueError):
    pass


_TOP_KEYS = {"grid", "sets", "solver", "spg", "datafit", "objective",
             "video", "sample", "generate", "input", "seed", "out"}
_SET_KEYS = {"label", "target", "transform", "kind", "lower", "upper",
             "lower_path", "upper_path", "value", "radius", "sigma_lower",
             "sigma_upper", "k", "per_frame", "r", "basis_path"}
_SOLVER_KEYS = {"max_iters", "eps_primal", "eps_dual", "cg_tol",
                "cg_max_iters", "rho_init", "gamma_init", "adapt_every",
                "adapt_factor_cap", "adapt_freeze_iter", "stagnation_window"}
_SPG_KEYS = {"max_iters", "ls_memory", "alpha_min", "alpha_max",
             "sufficient_decrease", "backtrack", "feasibility_tol",
             "step_tol", "min_gamma"}
_DATAFIT_KEYS = {"operator", "data", "kind", "lower", "upper",
                 "sigma_lower", "sigma_upper"}
_OBJECTIVE_KEYS = {"kind", "target", "operator", "data"}
_VIDEO_KEYS = {"training_frames", "persons", "person_width", "person_height",
               "range"}
_SAMPLE_KEYS = {"offset", "scale"}
_GENERATE_KEYS = {"kind", "dims", "background", "anomaly_depth", "rect",
                  "rank", "training_frames", "persons", "person_width",
                  "person_height", "mask_fraction"}


def _check_keys(section, mapping, allowed):
    if not isinstance(mapping, dict):
        raise ConfigError("section %r must be a mapping" % section)
    unknown = sorted(set(mapping) - allowed)
    if unknown:
        raise ConfigError("unknown key(s) %s in section %r"
                          % (", ".join(repr(k) for k in unknown), section))


def load_config(path):
    """Parse and schema-check a YAML config file."""
    with open(path) as fh:
        cfg = yaml.safe_load(fh)
    if cfg is None:
        cfg = {}
    _check_keys("top level", cfg, _TOP_KEYS)
    for name, keys in (("solver", _SOLVER_KEYS), ("spg", _SPG_KEYS),
                       ("datafit", _DATAFIT_KEYS),
                       ("objective", _OBJECTIVE_KEYS), ("video", _VIDEO_KEYS),
                       ("sample", _SAMPLE_KEYS), ("generate", _GENERATE_KEYS)):
        if name in cfg:
            _check_keys(name, cfg[name], keys)
    if "grid" in cfg:
        _check_keys("grid", cfg["grid"], {"dims"})
    for i, entry in enumerate(cfg.get("sets", []) or []):
        _check_keys("sets[%d]" % i, entry, _SET_KEYS)
    cfg["_dir"] = os.path.dirname(os.path.abspath(path))
    return cfg


def _resolve(cfg, path):
    if os.path.isabs(path):
        return path
    return os.path.join(cfg["_dir"], path)


def build_grid(cfg):
    if "grid" not in cfg or "dims" not in cfg["grid"]:
        raise ConfigError("config needs grid: {dims: [...]}")
    return ModelGrid(cfg["grid"]["dims"])


def _bound_value(cfg, entry, which):
    if which + "_path" in entry:
        return read_grid(_resolve(cfg, entry[which + "_path"])).data
    value = entry.get(which)
    if value is None:
        return -np.inf if which == "lower" else np.inf
    if isinstance(value, list):
        return np.asarray(value, dtype=float)
    return float(value)


def _build_transform(cfg, entry, label):
    tf = entry.get("transform", "identity")
    if isinstance(tf, str):
        if tf == "identity":
            return Transform.identity()
        if tf == "gradient":
            return Transform.gradient()
        raise ConfigError("%s: transform %r needs a mapping form" % (label, tf))
    _check_keys("%s transform" % label, tf, {"kind", "axis", "path"})
    kind = tf.get("kind")
    if kind == "derivative":
        return Transform.derivative(int(tf["axis"]))
    if kind == "identity":
        return Transform.identity()
    if kind == "gradient":
        return Transform.gradient()
    if kind == "file":
        return Transform.from_matrix(
            read_sparse_operator(_resolve(cfg, tf["path"])))
    raise ConfigError("%s: unknown transform kind %r" % (label, kind))


def _build_set(cfg, entry, grid, transform, label):
    kind = entry.get("kind")
    if kind == "box":
        return box(_bound_value(cfg, entry, "lower"),
                   _bound_value(cfg, entry, "upper"))
    if kind == "fixed":
        value = entry.get("value")
        if isinstance(value, list):
            value = np.asarray(value, dtype=float)
        return fixed(value)
    if kind == "l1_ball":
        return l1_ball(float(entry["radius"]))
    if kind == "l2_ball":
        return l2_ball(float(entry["radius"]))
    if kind == "l2_annulus":
        return l2_annulus(float(entry["sigma_lower"]),
                          float(entry["sigma_upper"]))
    if kind == "cardinality":
        partition = None
        if entry.get("per_frame"):
            partition = frame_partition(grid, transform)
        return cardinality(int(entry["k"]), partition=partition)
    if kind == "rank":
        if grid.ndim == 3:
            shape = grid.dims[:2]
            partition = frame_partition(grid)
        else:
            shape = grid.dims
            partition = None
        return rank_limit(int(entry["r"]), shape, partition=partition)
    if kind == "subspace":
        basis = read_grid(_resolve(cfg, entry["basis_path"]))
        partition = frame_partition(grid) if grid.ndim == 3 else None
        return subspace(basis=basis.to_array(), partition=partition)
    raise ConfigError("%s: unknown set kind %r" % (label, kind))


def build_spec(cfg, grid=None):
    """Construct and validate the constraint spec declared in a config."""
    if grid is None:
        grid = build_grid(cfg)
    entries = cfg.get("sets") or []
    if not entries:
        raise ConfigError("config declares no constraint sets")
    descriptors = []
    for i, entry in enumerate(entries):
        label = entry.get("label", "sets[%d]" % i)
        target = entry.get("target")
        if target not in ("u", "v", "sum"):
            raise ConfigError("%s: target must be u, v or sum" % label)
        transform = _build_transform(cfg, entry, label)
        eset = _build_set(cfg, entry, grid, transform, label)
        descriptors.append(SetDescriptor(target, transform, eset, label=label))
    return validate(MinkowskiSpec(grid, descriptors))


def build_admm_options(cfg, overrides=None):
    opts = dict(cfg.get("solver") or {})
    opts.update(overrides or {})
    return ADMMOptions(**opts)


def build_spg_options(cfg, overrides=None):
    opts = dict(cfg.get("spg") or {})
    opts.update(overrides or {})
    return SPGOptions(**opts)


def build_datafit(cfg, grid):
    """DataFitConstraint from the config's datafit section, or None."""
    from .datafit import DataFitConstraint

    section = cfg.get("datafit")
    if not section:
        return None
    d_obs = read_grid(_resolve(cfg, section["data"])).data
    operator = section.get("operator", "identity")
    if operator == "identity":
        import scipy.sparse as sp
        G = sp.identity(grid.N, format="csr")
    else:
        G = read_sparse_operator(_resolve(cfg, operator))
    kind = section.get("kind", "pointwise")
    if kind == "pointwise":
        return DataFitConstraint(G, d_obs, kind="pointwise",
                                 lower=float(section.get("lower", 0.0)),
                                 upper=float(section.get("upper", 0.0)))
    if kind == "l2_annulus":
        return DataFitConstraint(G, d_obs, kind="l2_annulus",
                                 sigma_lower=float(section.get("sigma_lower", 0.0)),
                                 sigma_upper=float(section["sigma_upper"]))
    raise ConfigError("unknown datafit kind %r" % kind)


def build_objective(cfg, grid):
    """Objective callable for the outer solver from the config."""
    from .objectives import least_squares, proximity

    section = cfg.get("objective")
    if not section:
        raise ConfigError("solve-spg needs an objective section")
    kind = section.get("kind")
    if kind == "proximity":
        target = read_grid(_resolve(cfg, section["target"]))
        return proximity(target.data)
    if kind == "least_squares":
        G = read_sparse_operator(_resolve(cfg, section["operator"]))
        d_obs = read_grid(_resolve(cfg, section["data"])).data
        return least_squares(G, d_obs)
    raise ConfigError("unknown objective kind %r" % kind)
