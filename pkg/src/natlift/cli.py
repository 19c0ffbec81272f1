"""Command-line front end: ``natlift verify | scan | decompose``.

A run is described by one JSON document (``--config``); every flag overrides
the matching field.  Exit codes: 0 when all checks pass, 1 when a check
fails, 2 for usage, configuration or I/O errors.
"""

from __future__ import annotations

import argparse
import copy
import csv
import io
import json
import logging
import sys
import time
from contextlib import contextmanager

import numpy as np

from . import base as _base
from . import curvature as _curv
from . import lift as _lift
from . import oracle as _oracle
from .connection import connection_at
from .curvature import FAMILY_NAMES, SAME_KIND, SampleSpec
from .errors import ConfigError, DecompositionError, DegenerateMetricError, NatLiftError
from .scalarfn import parse_coeff

log = logging.getLogger("natlift")

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2

DEFAULT_CONFIG = {
    "base": {"kind": "euclidean", "dim": 2},
    "lift": {"preset": "sasaki"},
    "sample": {"points": 10, "planes": 200, "seed": 0, "y_scale": 1.0, "fd_points": 3},
    "tolerances": {"closed_form": 1e-9, "fd": 1e-4, "flatness": 1e-8},
    "expect": {"flat": None, "constant_curvature": False},
    "decompose": {"family": "YXXY", "k": 0.0},
    "output": {"path": None},
}


class UsageError(Exception):
    pass


def _merge(dst: dict, src: dict) -> dict:
    for key, val in src.items():
        if isinstance(val, dict) and isinstance(dst.get(key), dict) and key not in ("base", "lift"):
            _merge(dst[key], val)
        else:
            dst[key] = val
    return dst


def load_config(path: str | None) -> dict:
    cfg = copy.deepcopy(DEFAULT_CONFIG)
    if path is None:
        return cfg
    try:
        with open(path, encoding="utf-8") as fh:
            doc = json.load(fh)
    except OSError as exc:
        raise UsageError(f"cannot read config {path!r}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise UsageError(f"config {path!r} is not valid JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise UsageError("config must be a JSON object")
    unknown = set(doc) - set(DEFAULT_CONFIG)
    if unknown:
        raise UsageError(f"unknown config sections {sorted(unknown)}")
    return _merge(cfg, doc)


def apply_overrides(cfg: dict, args: argparse.Namespace) -> dict:
    if args.base is not None:
        cfg["base"] = args.base
    if args.preset is not None:
        lift_cfg = {"preset": args.preset}
        if args.preset == "theorem4":
            prev = cfg["lift"] if cfg["lift"].get("preset") == "theorem4" else {}
            lift_cfg.update({k: prev[k] for k in ("alpha", "beta", "c") if k in prev})
        cfg["lift"] = lift_cfg
    for name in ("alpha", "beta"):
        text = getattr(args, name)
        if text is not None:
            cfg["lift"][name] = parse_coeff(text).to_config()
    if args.c is not None:
        cfg["lift"]["c"] = args.c
    sample = cfg["sample"]
    for key in ("seed", "points", "planes", "fd_points"):
        val = getattr(args, key)
        if val is not None:
            sample[key] = val
    if args.out is not None:
        cfg["output"]["path"] = args.out
    if getattr(args, "expect_constant_curvature", False):
        cfg["expect"]["constant_curvature"] = True
    if getattr(args, "expect_flat", None) is not None:
        cfg["expect"]["flat"] = args.expect_flat
    if getattr(args, "family", None) is not None:
        cfg["decompose"]["family"] = args.family
    if getattr(args, "k", None) is not None:
        cfg["decompose"]["k"] = args.k
    return cfg


def _validate(cfg: dict) -> None:
    s = cfg["sample"]
    for key in ("points", "planes", "fd_points"):
        if not isinstance(s.get(key), int) or s[key] < 1:
            raise ConfigError(f"sample.{key} must be an integer >= 1")
    if not isinstance(s.get("seed"), int):
        raise ConfigError("sample.seed must be an integer")
    for key, val in cfg["tolerances"].items():
        if not isinstance(val, (int, float)) or val <= 0:
            raise ConfigError(f"tolerances.{key} must be positive")


def build(cfg: dict):
    _validate(cfg)
    model = _base.from_config(cfg["base"])
    params = _lift.from_config(cfg["lift"])
    s = cfg["sample"]
    spec = SampleSpec(points=s["points"], planes=s["planes"], seed=s["seed"],
                      y_scale=float(s.get("y_scale", 1.0)))
    return model, params, spec


def _expect_flat(cfg: dict) -> bool:
    flag = cfg["expect"].get("flat")
    if flag is None:
        # the closed-form family is offered as flat on a flat base
        return cfg["lift"].get("preset") == "theorem4"
    return bool(flag)


# -- report helpers ----------------------------------------------------------------

def _pt_dict(pt) -> dict:
    return {"x": pt.x.tolist(), "y": pt.y.tolist()}


class Report:
    def __init__(self, command: str, cfg: dict):
        self.data = {"command": command, "config": cfg, "checks": [], "timings": {}}

    @contextmanager
    def phase(self, name: str):
        t0 = time.perf_counter()
        try:
            yield
        finally:
            self.data["timings"][name] = round(time.perf_counter() - t0, 6)

    def check(self, name, measured, tolerance, worst=None, passed=None, **extra):
        ok = measured <= tolerance if passed is None else passed
        entry = {"name": name, "status": "pass" if ok else "fail",
                 "measured": float(measured), "tolerance": float(tolerance)}
        if not ok and worst is not None:
            entry["worst"] = worst
        entry.update(extra)
        self.data["checks"].append(entry)
        return ok

    @property
    def passed(self) -> bool:
        return all(c["status"] == "pass" for c in self.data["checks"])


def _worst(values, pts, entries=None):
    i = int(np.argmax(values))
    w = {"point_index": i, **_pt_dict(pts[i])}
    if entries is not None:
        w["entry"] = list(entries[i])
    return w


def _rel(a, b):
    return float(np.abs(a - b).max() / (1.0 + np.abs(b).max()))


# -- checks --------------------------------------------------------------------------

def _check_inverse(rep, params, model, pts, tol):
    errs = []
    for pt in pts:
        geom = model.geometry_at(pt.x)
        lp = _lift.evaluate(params, geom, pt.y)
        b, h = lp.blocks, lp.inverse
        eye = np.eye(geom.dim)
        ident = max(np.abs(b.G1 @ h.H1 + b.G3 @ h.H3 - eye).max(),
                    np.abs(b.G1 @ h.H3 + b.G3 @ h.H2).max(),
                    np.abs(b.G3 @ h.H1 + b.G2 @ h.H3).max(),
                    np.abs(b.G3 @ h.H3 + b.G2 @ h.H2 - eye).max())
        num = _lift.inverse_blocks_numeric(b)
        diff = max(np.abs(getattr(h, k) - getattr(num, k)).max() for k in ("H1", "H2", "H3"))
        errs.append(max(ident, diff))
    rep.check("inverse_identity", max(errs), tol, _worst(errs, pts))


def _check_connection(rep, params, model, pts, tol_fd, tol_cf):
    mc, tor = [], []
    for pt in pts:
        mc.append(_oracle.metric_compatibility_residual(params, model, pt))
        geom = model.geometry_at(pt.x)
        coeffs, _ = connection_at(_lift.evaluate(params, geom, pt.y))
        tor.append(_oracle.torsion_residual(coeffs, geom, pt.y))
    rep.check("metric_compatibility", max(mc), tol_fd, _worst(mc, pts))
    rep.check("torsion_free", max(tor), tol_cf, _worst(tor, pts))


def _check_symmetry(rep, evals, pts, tol):
    errs, where = [], []
    for K, blocks in evals:
        s = K.stacked
        scale = 1.0 + np.abs(s).max()
        anti = np.abs(s[:len(SAME_KIND)] + np.swapaxes(s[:len(SAME_KIND)], -1, -2))
        F = _curv.full_tensor(K)
        # lowered L[D, C, A, B] = G(K(E_A, E_B) E_C, E_D)
        L = np.einsum("ed,dcab->ecab", blocks.full(), F)
        pair = np.abs(L - np.transpose(L, (2, 3, 0, 1)))
        last = np.abs(L + np.swapaxes(L, 2, 3))
        cand = [(anti.max(), ("family",) + tuple(int(v) for v in np.unravel_index(anti.argmax(), anti.shape))),
                (pair.max(), ("pair_exchange",) + tuple(int(v) for v in np.unravel_index(pair.argmax(), pair.shape))),
                (last.max(), ("last_pair",) + tuple(int(v) for v in np.unravel_index(last.argmax(), last.shape)))]
        val, idx = max(cand, key=lambda c: c[0])
        errs.append(float(val / scale))
        where.append(idx)
    rep.check("curvature_symmetry", max(errs), tol, _worst(errs, pts, where))


def _check_oracle(rep, params, model, pts, evals, tol):
    errs, where = [], []
    for pt, (K, _) in zip(pts, evals):
        geom = model.geometry_at(pt.x)
        e, idx = _oracle.compare_adapted_detail(K, _oracle.fd_riemann(params, model, pt), geom, pt)
        errs.append(e)
        where.append(idx)
    rep.check("oracle_equivalence", max(errs), tol, _worst(errs, pts, where))


def _sectional_table(planes):
    return [{"sample_id": p.sample_id, "point_index": p.point, "k_value": p.k_value} for p in planes]


def cmd_verify(cfg: dict) -> tuple[int, dict]:
    model, params, spec = build(cfg)
    tol = cfg["tolerances"]
    rep = Report("verify", cfg)
    with rep.phase("sampling"):
        pts, evals, planes = _curv.scan_planes(params, model, spec)
    with rep.phase("inverse_identity"):
        _check_inverse(rep, params, model, pts, tol["closed_form"])
    with rep.phase("connection"):
        _check_connection(rep, params, model, pts, tol["fd"], tol["closed_form"])
    with rep.phase("curvature_symmetry"):
        _check_symmetry(rep, evals, pts, tol["closed_form"])
    with rep.phase("oracle_equivalence"):
        n_fd = min(cfg["sample"]["fd_points"], len(pts))
        _check_oracle(rep, params, model, pts[:n_fd], evals[:n_fd], tol["fd"])
    with rep.phase("flatness"):
        fr = _curv.flatness_report(params, model, spec)
        summary = fr.to_dict()
        rep.data["flatness"] = summary
        rep.data["sectional_samples"] = _sectional_table(fr.planes)
        worst = {"point_index": fr.worst_point, **_pt_dict(pts[fr.worst_point])}
        if _expect_flat(cfg):
            rep.check("flatness", max(fr.residual_at_zero, abs(fr.k_min), abs(fr.k_max)),
                      tol["flatness"], worst, per_family=summary["per_family_residual_at_k0"])
        if cfg["expect"].get("constant_curvature"):
            measured = max(fr.min_residual, fr.spread)
            rep.check("constant_curvature", measured, tol["flatness"], worst,
                      sectional_spread=fr.spread, best_k=fr.best_k)
    rep.data["status"] = "pass" if rep.passed else "fail"
    return (EXIT_OK if rep.passed else EXIT_FAIL), rep.data


def scan_rows(cfg: dict) -> tuple[list[str], list[list[str]], list]:
    model, params, spec = build(cfg)
    _, _, planes = _curv.scan_planes(params, model, spec)
    n = model.dim
    header = (["sample_id"] + [f"x{i + 1}" for i in range(n)] + [f"y{i + 1}" for i in range(n)]
              + [f"X{i + 1}" for i in range(2 * n)] + [f"Y{i + 1}" for i in range(2 * n)] + ["k_value"])
    rows = []
    for p in planes:
        vals = list(p.x) + list(p.y) + list(p.X) + list(p.Y) + [p.k_value]
        rows.append([str(p.sample_id)] + [repr(float(v)) for v in vals])
    return header, rows, planes


def cmd_scan(cfg: dict) -> tuple[int, str, dict]:
    t0 = time.perf_counter()
    header, rows, planes = scan_rows(cfg)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    ks = np.array([p.k_value for p in planes])
    summary = {"planes": len(planes), "k_min": float(ks.min()), "k_max": float(ks.max()),
               "spread": float(ks.max() - ks.min()), "seconds": round(time.perf_counter() - t0, 6)}
    code = EXIT_OK
    if _expect_flat(cfg) and np.abs(ks).max() > cfg["tolerances"]["flatness"]:
        code = EXIT_FAIL
        summary["worst_sample_id"] = int(np.argmax(np.abs(ks)))
    return code, buf.getvalue(), summary


def _family_input(name: str, K, blocks, k: float):
    if name.endswith("0") and name[:-1] in FAMILY_NAMES:
        return _curv.k0_components(k, blocks)[name[:-1]]
    if name in FAMILY_NAMES:
        return K[name]
    raise ConfigError(f"unknown curvature family {name!r}; use one of {', '.join(FAMILY_NAMES)}")


def cmd_decompose(cfg: dict) -> tuple[int, dict]:
    model, params, spec = build(cfg)
    if model.dim < 3:
        raise UsageError(f"decompose needs a base of dimension >= 3, got {model.dim}")
    fam = cfg["decompose"]["family"]
    k = float(cfg["decompose"]["k"])
    base_name = fam[:-1] if fam.endswith("0") else fam
    rep = Report("decompose", cfg)
    rows, worst_abs = [], []
    with rep.phase("decompose"):
        for idx, pt in enumerate(_curv.sample_tangent_points(model, spec)):
            geom = model.geometry_at(pt.x)
            K, blocks = _curv.curvature_and_blocks(params, geom, pt.y)
            T = _family_input(fam, K, blocks, k) - _curv.k0_components(k, blocks)[base_name]
            dec = _curv.lemma2_decompose(T, geom, pt.y)
            rows.append({"point_index": idx, **_pt_dict(pt), "alpha": list(dec.coeffs),
                         "residual": dec.residual})
            worst_abs.append(max(abs(a) for a in dec.coeffs))
    rep.data["patterns"] = list(_curv.LEMMA2_PATTERNS)
    rep.data["coefficients"] = rows
    pts = _curv.sample_tangent_points(model, spec)
    if _expect_flat(cfg):
        rep.check("coefficients_vanish", max(worst_abs), cfg["tolerances"]["flatness"],
                  _worst(worst_abs, pts))
    rep.data["max_abs_alpha"] = max(worst_abs)
    rep.data["status"] = "pass" if rep.passed else "fail"
    return (EXIT_OK if rep.passed else EXIT_FAIL), rep.data


# -- entry point -------------------------------------------------------------------

def _parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON run configuration")
    common.add_argument("--seed", type=int)
    common.add_argument("--out", help="output path (report JSON, or CSV for scan); default stdout")
    common.add_argument("--base", help="base model, e.g. euclidean:2 or sphere:2:1")
    common.add_argument("--preset", choices=("sasaki", "cheeger-gromoll", "theorem4"))
    common.add_argument("--alpha", help="theorem4 alpha, e.g. poly:1,1")
    common.add_argument("--beta", help="theorem4 beta, e.g. const:0.5")
    common.add_argument("--c", type=float, help="theorem4 constant c")
    common.add_argument("--points", type=int, help="number of sampled tangent points")
    common.add_argument("--planes", type=int, help="number of sampled 2-planes")
    common.add_argument("--fd-points", type=int, dest="fd_points",
                        help="points used for the finite-difference oracle")
    flat = common.add_mutually_exclusive_group()
    flat.add_argument("--expect-flat", dest="expect_flat", action="store_const", const=True)
    flat.add_argument("--no-expect-flat", dest="expect_flat", action="store_const", const=False)
    common.add_argument("-v", "--verbose", action="store_true")

    p = argparse.ArgumentParser(prog="natlift", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)
    v = sub.add_parser("verify", parents=[common], help="run the verification checks")
    v.add_argument("--expect-constant-curvature", action="store_true")
    sub.add_parser("scan", parents=[common], help="write sectional curvatures of sampled planes as CSV")
    d = sub.add_parser("decompose", parents=[common], help="isotropic coefficients of K - K0")
    d.add_argument("--family", help="curvature family, e.g. YXXY (append 0 for the K0 family)")
    d.add_argument("--k", type=float, help="constant for K0")
    return p


def _write(path: str | None, text: str) -> None:
    if path is None:
        sys.stdout.write(text)
        return
    try:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    except OSError as exc:
        raise UsageError(f"cannot write {path!r}: {exc}") from exc


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    try:
        cfg = apply_overrides(load_config(args.config), args)
        out = cfg["output"]["path"]
        if args.command == "verify":
            code, report = cmd_verify(cfg)
            _write(out, json.dumps(report, indent=2) + "\n")
        elif args.command == "scan":
            code, text, summary = cmd_scan(cfg)
            _write(out, text)
            log.info("scan summary: %s", json.dumps(summary))
            if code != EXIT_OK:
                print(f"scan: sectional curvatures not flat: {json.dumps(summary)}", file=sys.stderr)
        else:
            code, report = cmd_decompose(cfg)
            _write(out, json.dumps(report, indent=2) + "\n")
        for c in (report["checks"] if args.command != "scan" else []):
            if c["status"] == "fail":
                print(f"FAIL {c['name']}: measured {c['measured']:.3e} > {c['tolerance']:.1e}",
                      file=sys.stderr)
        return code
    except (UsageError, ConfigError) as exc:
        print(f"natlift: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except DegenerateMetricError as exc:
        print(f"natlift: error: lifted metric is degenerate ({exc.inequality} fails at t={exc.t}): {exc}",
              file=sys.stderr)
        return EXIT_USAGE
    except (DecompositionError, NatLiftError) as exc:
        print(f"natlift: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
