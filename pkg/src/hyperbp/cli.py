"""Command line runner.

    hyperbp {construct,scan,perturb,certify,check} [--config run.toml] [overrides]

Exit codes: 0 success, 1 runtime error, 2 certification (or a check)
failed, 3 invalid configuration. Artifacts go to the output directory;
logs go to standard error.
"""
from __future__ import annotations

import argparse
import csv
import datetime as _dt
import json
import logging
import math
import os
import sys
import time

import numpy as np

from . import __version__
from . import pipeline as pl
from .config import ConfigError, RunConfig, load, validate

log = logging.getLogger("hyperbp")

EXIT_OK, EXIT_ERROR, EXIT_FAILED, EXIT_CONFIG = 0, 1, 2, 3


# ---------------------------------------------------------------------------
# artifacts
# ---------------------------------------------------------------------------

def _clean(obj):
    """JSON-safe copy: numpy scalars/arrays to Python, non-finite floats to strings."""
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _clean(obj.tolist())
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        return x if math.isfinite(x) else repr(x)
    return obj


def dumps(payload: dict) -> str:
    return json.dumps(_clean(payload), indent=2, sort_keys=True) + "\n"


def write_json(path: str, payload: dict, started: float, timings: dict):
    doc = dict(payload)
    # the only non-reproducible fields live here
    doc["metadata"] = {
        "timestamp": _dt.datetime.now(_dt.timezone.utc).isoformat(timespec="seconds"),
        "elapsed_seconds": time.perf_counter() - started,
        "stage_seconds": timings,
        "version": __version__,
    }
    with open(path, "w") as fh:
        fh.write(dumps(doc))
    log.info("wrote %s", path)


def write_csv(path: str, header, columns):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in zip(*columns):
            w.writerow([f"{float(x):.15g}" for x in row])
    log.info("wrote %s", path)


def write_profile(path: str, body, points: int):
    """Profile CSV plus a JSON sidecar {n, smoothness_class, pieces, ...}."""
    phi = np.linspace(0.0, math.pi / 2, points)
    write_csv(path, ["phi_radians", "rho"], [phi, body.profile(phi)])
    with open(os.path.splitext(path)[0] + ".json", "w") as fh:
        fh.write(dumps(body.describe()))


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------

def _base(cfg: RunConfig) -> dict:
    return {"config": cfg.to_dict(), "version": __version__}


def cmd_construct(cfg: RunConfig, out: str, started: float) -> int:
    timings: dict = {}
    with pl.stage("construct", timings):
        bodies = pl.build_bodies(cfg)
    with pl.stage("convexity", timings):
        conv = pl.convexity_summary(bodies.L, cfg.certify.seed)
    write_profile(os.path.join(out, "L_profile.csv"), bodies.L, cfg.output.profile_points)
    write_profile(os.path.join(out, "M_profile.csv"), bodies.M, cfg.output.profile_points)
    payload = _base(cfg)
    payload.update({"L": bodies.L.describe(), "M": bodies.M.describe(), "M_half_height": bodies.N,
                    "L_convexity": conv,
                    "profiles": {"L": "L_profile.csv", "M": "M_profile.csv"}})
    write_json(os.path.join(out, "construct.json"), payload, started, timings)
    return EXIT_OK


def cmd_scan(cfg: RunConfig, out: str, started: float) -> int:
    timings: dict = {}
    with pl.stage("construct", timings):
        body = pl.scan_body(cfg)
    with pl.stage("scan", timings):
        prof = pl.run_scan(cfg, body)
    write_csv(os.path.join(out, "ft_profile.csv"), ["angle_radians", "ft_value"], [prof.angles, prof.values])
    payload = _base(cfg)
    payload["ft_profile"] = prof.to_dict()
    write_json(os.path.join(out, "scan.json"), payload, started, timings)
    return EXIT_OK


def cmd_perturb(cfg: RunConfig, out: str, started: float) -> int:
    timings: dict = {}
    with pl.stage("construct", timings):
        bodies = pl.build_bodies(cfg)
    with pl.stage("scan", timings):
        prof = pl.run_scan(cfg, bodies.M)
    pert = pl.run_perturb(cfg, bodies, prof, timings)
    phi = np.linspace(0.0, math.pi / 2, cfg.output.profile_points)
    write_csv(os.path.join(out, "perturbation.csv"), ["phi_radians", "v", "g"],
              [phi, pert.bump(phi), pert.g(phi)])
    payload = _base(cfg)
    payload.update({
        "scan": prof.to_dict(),
        "negative_set": pert.omega.to_dict(),
        "bump": {"center": pert.bump.spec.center_angle, "half_width": pert.bump.spec.half_width,
                 "amplitude": pert.bump.spec.amplitude},
        "g": pert.g.to_dict(),
        "zhang": pert.zhang,
    })
    write_json(os.path.join(out, "perturb.json"), payload, started, timings)
    return EXIT_OK if pert.zhang["passed"] else EXIT_FAILED


def cmd_certify(cfg: RunConfig, out: str, started: float) -> int:
    run = pl.run_counterexample(cfg)
    write_profile(os.path.join(out, "K_profile.csv"), run.K, cfg.output.profile_points)
    write_profile(os.path.join(out, "L_profile.csv"), run.bodies.L, cfg.output.profile_points)
    write_json(os.path.join(out, "certificate.json"), run.payload(cfg), started, run.timings)
    return EXIT_OK if run.report.certified else EXIT_FAILED


def cmd_check(cfg: RunConfig, out: str, started: float) -> int:
    timings: dict = {}
    with pl.stage("lemma residuals", timings):
        res = pl.run_checks(cfg)
    payload = _base(cfg)
    payload["checks"] = res
    write_json(os.path.join(out, "check.json"), payload, started, timings)
    return EXIT_OK if res["passed"] else EXIT_FAILED


COMMANDS = {
    "construct": cmd_construct,
    "scan": cmd_scan,
    "perturb": cmd_perturb,
    "certify": cmd_certify,
    "check": cmd_check,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="TOML run configuration")
    common.add_argument("--n", type=int, help="ambient dimension")
    common.add_argument("--k", type=int, help="codimension of the compared sections (section dim = n - k)")
    common.add_argument("--section-dim", type=int, help="dimension of the compared sections")
    common.add_argument("--lambda", dest="lam", type=float, help="cap height parameter of the cylinder body")
    common.add_argument("--seed", type=int, help="seed for plane sampling and convexity tests")
    common.add_argument("--out", help="output directory")
    common.add_argument("--tol", type=float, help="relative tolerance of Fourier evaluations")
    common.add_argument("--planes", type=int, help="number of random planes in the certificate")
    common.add_argument("--body", choices=["M", "ball"], help="body to scan")
    common.add_argument("-v", "--verbose", action="store_true", help="debug logging")

    p = argparse.ArgumentParser(prog="hyperbp", description="Hyperbolic section comparison pipeline.")
    sub = p.add_subparsers(dest="command", required=True)
    helps = {
        "construct": "build L and M and export their profiles",
        "scan": "Fourier transform of ||x||^{-k} over angles from the axis",
        "perturb": "negative set, bump v, perturbation g and the Zhang check",
        "certify": "full pipeline and certificate",
        "check": "lemma residual suite",
    }
    for name, text in helps.items():
        sub.add_parser(name, help=text, parents=[common])
    return p


def apply_overrides(cfg: RunConfig, args) -> RunConfig:
    if args.n is not None:
        cfg.body.n = args.n
    if args.k is not None:
        cfg.body.k, cfg.body.section_dim = args.k, None
    if args.section_dim is not None:
        cfg.body.section_dim, cfg.body.k = args.section_dim, None
    if args.k is None and args.section_dim is None and args.n is not None:
        # a new n keeps the codimension k
        cfg.body.section_dim = None
    if args.lam is not None:
        cfg.body.lam = args.lam
    if args.seed is not None:
        cfg.certify.seed = args.seed
    if args.out is not None:
        cfg.output.dir = args.out
    if args.tol is not None:
        cfg.scan.ft_rtol = args.tol
    if args.planes is not None:
        cfg.certify.plane_count = args.planes
    if args.body is not None:
        cfg.scan.body = args.body
    return validate(cfg)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.INFO, stream=sys.stderr,
                        format="%(asctime)s %(levelname)s %(message)s")
    try:
        cfg = apply_overrides(load(args.config), args)
    except ConfigError as exc:
        log.error("invalid config: %s", exc)
        return EXIT_CONFIG
    started = time.perf_counter()
    try:
        os.makedirs(cfg.output.dir, exist_ok=True)
        code = COMMANDS[args.command](cfg, cfg.output.dir, started)
    except Exception as exc:  # noqa: BLE001 - every failure maps to exit code 1
        log.exception("%s failed: %s", args.command, exc)
        return EXIT_ERROR
    log.info("%s finished with exit code %d", args.command, code)
    return code


if __name__ == "__main__":
    sys.exit(main())
