"""Command-line driver.

Subcommands: project, solve-spg, project-datafit, video-decompose, sample,
check, generate. All take --config; outputs land in --out-dir as grid files
plus a deterministic text report and CSV residual traces, so identical
configs and seeds reproduce identical files byte for byte. Timing goes to
the console only.
"""

import argparse
import json
import os
import sys

import numpy as np

from . import synthetic
from .admm import admm_project
from .config import (ConfigError, build_admm_options, build_datafit,
                     build_objective, build_spec, build_spg_options,
                     load_config)
from .datafit import project_with_datafit
from .fileio import (read_grid, write_grid, write_history_csv, write_pgm,
                     write_report, write_residual_csv, write_sparse_operator)
from .grid import ModelGrid, ModelVector
from .spec import SpecValidationError, sample_element
from .spg import spg_minimize
from .video import AnomalyBudgets, video_decompose


def _parser():
    p = argparse.ArgumentParser(
        prog="minkproj",
        description="Projection onto generalized Minkowski constraint sets "
                    "and constrained inversion built on it.")
    sub = p.add_subparsers(dest="command", required=True)
    for name, help_text in (
            ("project", "project the input model onto the constraint set"),
            ("solve-spg", "minimize the configured misfit over the set"),
            ("project-datafit", "project with an extra data-fit constraint"),
            ("video-decompose", "split a video into background and anomaly"),
            ("sample", "project a random seed vector to sample the set"),
            ("check", "validate the config and constraint spec"),
            ("generate", "write a synthetic instance and its ground truth")):
        cmd = sub.add_parser(name, help=help_text)
        cmd.add_argument("--config", required=True, help="YAML config file")
        cmd.add_argument("--out-dir", default=".", help="output directory")
        cmd.add_argument("--seed", type=int, default=None,
                         help="override the config seed")
        cmd.add_argument("--max-iters", type=int, default=None,
                         help="override solver iteration budget")
        cmd.add_argument("--tol", type=float, default=None,
                         help="override primal/dual stopping tolerances")
        cmd.add_argument("--threads", type=int, default=None,
                         help="worker threads for internal linear algebra "
                              "(results do not depend on it)")
        cmd.add_argument("--pgm", action="store_true",
                         help="also dump 2D slices as PGM images")
    return p


def _solver_overrides(args):
    overrides = {}
    if args.max_iters is not None:
        overrides["max_iters"] = args.max_iters
    if args.tol is not None:
        overrides["eps_primal"] = args.tol
        overrides["eps_dual"] = args.tol
    return overrides


def _load_input(cfg):
    if "input" not in cfg:
        raise ConfigError("config needs an input grid file")
    path = cfg["input"]
    if not os.path.isabs(path):
        path = os.path.join(cfg["_dir"], path)
    return read_grid(path)


def _dump_components(out_dir, named, pgm=False):
    for name, vec in named.items():
        write_grid(os.path.join(out_dir, name + ".gmsk"), vec)
        if pgm and vec.grid.ndim == 2:
            write_pgm(os.path.join(out_dir, name + ".pgm"), vec.to_array())
        elif pgm and vec.grid.ndim == 3:
            arr = vec.to_array()
            lo, hi = arr.min(), arr.max()
            for t in range(arr.shape[2]):
                write_pgm(os.path.join(out_dir, "%s_t%03d.pgm" % (name, t)),
                          arr[:, :, t], lo=lo, hi=hi)


def _finish(out_dir, report, extra=None):
    write_report(os.path.join(out_dir, "report.txt"), report, extra=extra)
    write_residual_csv(os.path.join(out_dir, "residuals.csv"), report.history)
    print("converged=%s iterations=%d wall_time=%.3fs"
          % (report.converged, report.iterations, report.wall_time))


def cmd_project(args, cfg):
    spec = build_spec(cfg)
    opts = build_admm_options(cfg, _solver_overrides(args))
    m = _load_input(cfg)
    w, u, v, report = admm_project(m, spec, opts)
    _dump_components(args.out_dir, {"w": w, "u": u, "v": v}, pgm=args.pgm)
    _finish(args.out_dir, report)
    return 0


def cmd_project_datafit(args, cfg):
    spec = build_spec(cfg)
    opts = build_admm_options(cfg, _solver_overrides(args))
    dfc = build_datafit(cfg, spec.grid)
    m = _load_input(cfg)
    x, u, v, report = project_with_datafit(m, spec, dfc, opts)
    _dump_components(args.out_dir, {"w": x, "u": u, "v": v}, pgm=args.pgm)
    _finish(args.out_dir, report)
    return 0


def cmd_solve_spg(args, cfg):
    spec = build_spec(cfg)
    admm_opts = build_admm_options(cfg, _solver_overrides(args))
    spg_opts = build_spg_options(cfg)
    objective = build_objective(cfg, spec.grid)
    m0 = _load_input(cfg)
    m, history = spg_minimize(objective, m0, spec, spg_opts, admm_opts)
    _dump_components(args.out_dir, {"m": m}, pgm=args.pgm)
    write_history_csv(os.path.join(args.out_dir, "history.csv"), history)
    print("status=%s iterations=%d" % (history["status"], len(history["f"])))
    return 0


def cmd_video_decompose(args, cfg):
    opts = build_admm_options(cfg, _solver_overrides(args))
    section = dict(cfg.get("video") or {})
    training = int(section.get("training_frames", 8))
    budgets = AnomalyBudgets(
        persons=int(section.get("persons", 10)),
        person_width=int(section.get("person_width", 12)),
        person_height=int(section.get("person_height", 11)))
    value_range = tuple(section.get("range", (0.0, 255.0)))
    tensor = _load_input(cfg)
    background, anomaly, report = video_decompose(
        tensor, training, budgets=budgets, value_range=value_range, opts=opts)
    _dump_components(args.out_dir, {"background": background,
                                    "anomaly": anomaly}, pgm=args.pgm)
    _finish(args.out_dir, report)
    return 0


def cmd_sample(args, cfg, seed):
    spec = build_spec(cfg)
    opts = build_admm_options(cfg, _solver_overrides(args))
    section = dict(cfg.get("sample") or {})
    rng = np.random.default_rng(seed)
    seed_vec = (section.get("offset", 0.0) +
                section.get("scale", 1.0) * rng.standard_normal(spec.grid.N))
    u, v, report = sample_element(spec, ModelVector(spec.grid, seed_vec), opts)
    w = ModelVector(spec.grid, u.data + v.data)
    _dump_components(args.out_dir, {"w": w, "u": u, "v": v}, pgm=args.pgm)
    _finish(args.out_dir, report, extra={"seed": seed})
    return 0


def cmd_check(args, cfg):
    spec = build_spec(cfg)
    build_admm_options(cfg)
    print("config ok: p=%d q=%d r=%d s=%d convex=%s"
          % (spec.p, spec.q, spec.r, spec.s, spec.all_convex))
    return 0


def cmd_generate(args, cfg, seed):
    section = dict(cfg.get("generate") or {})
    kind = section.get("kind")
    out = args.out_dir
    if kind == "blocky-anomaly-2d":
        inst = synthetic.blocky_anomaly_2d(
            dims=tuple(section.get("dims", (20, 20))),
            background=float(section.get("background", 2500.0)),
            anomaly_depth=float(section.get("anomaly_depth", -150.0)),
            rect=tuple(section["rect"]) if "rect" in section else None,
            seed=seed)
        write_grid(os.path.join(out, "model.gmsk"), inst["model"])
        grid = inst["grid"]
        write_grid(os.path.join(out, "anomaly_true.gmsk"),
                   ModelVector(grid, inst["anomaly"]))
        sidecar = {"kind": kind, "seed": seed, "rect": list(inst["rect"]),
                   "support": np.flatnonzero(inst["support"]).tolist()}
        if "mask_fraction" in section:
            G, keep = synthetic.random_mask_operator(
                grid.N, float(section["mask_fraction"]), seed=seed)
            write_sparse_operator(os.path.join(out, "mask.txt"), G)
            write_grid(os.path.join(out, "data.gmsk"),
                       ModelVector(ModelGrid((keep.size, 1)),
                                   G @ inst["model"].data))
            sidecar["kept_indices"] = keep.tolist()
    elif kind == "lowrank-sparse-video":
        inst = synthetic.lowrank_sparse_video(
            dims=tuple(section.get("dims", (32, 24, 40))),
            rank=int(section.get("rank", 2)),
            training_frames=int(section.get("training_frames", 8)),
            persons=int(section.get("persons", 2)),
            person_width=int(section.get("person_width", 4)),
            person_height=int(section.get("person_height", 6)),
            seed=seed)
        grid = inst["grid"]
        write_grid(os.path.join(out, "video.gmsk"), inst["tensor"])
        write_grid(os.path.join(out, "background_true.gmsk"),
                   ModelVector(grid, inst["background"].ravel(order="F")))
        write_grid(os.path.join(out, "anomaly_true.gmsk"),
                   ModelVector(grid, inst["anomaly"].ravel(order="F")))
        sidecar = {"kind": kind, "seed": seed,
                   "training_frames": inst["training_frames"],
                   "persons": inst["persons"],
                   "person_width": inst["person_width"],
                   "person_height": inst["person_height"],
                   "support": np.flatnonzero(
                       inst["support"].ravel(order="F")).tolist()}
    else:
        raise ConfigError("generate needs kind blocky-anomaly-2d or "
                          "lowrank-sparse-video")
    with open(os.path.join(out, "truth.json"), "w") as fh:
        json.dump(sidecar, fh, sort_keys=True)
    print("generated %s into %s" % (kind, out))
    return 0


def main(argv=None):
    args = _parser().parse_args(argv)
    try:
        cfg = load_config(args.config)
        seed = args.seed if args.seed is not None else int(cfg.get("seed", 0))
        os.makedirs(args.out_dir, exist_ok=True)
        if args.command == "project":
            return cmd_project(args, cfg)
        if args.command == "project-datafit":
            return cmd_project_datafit(args, cfg)
        if args.command == "solve-spg":
            return cmd_solve_spg(args, cfg)
        if args.command == "video-decompose":
            return cmd_video_decompose(args, cfg)
        if args.command == "sample":
            return cmd_sample(args, cfg, seed)
        if args.command == "check":
            return cmd_check(args, cfg)
        if args.command == "generate":
            return cmd_generate(args, cfg, seed)
        raise ConfigError("unknown command %r" % args.command)
    except (ConfigError, SpecValidationError, ValueError, OSError) as exc:
        print("error: %s" % exc, file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
