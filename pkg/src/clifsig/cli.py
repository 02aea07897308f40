"""Batch command-line front end.

stdout carries JSON lines only; human-readable messages go to stderr.
Exit codes: 0 success, 1 verification failure, 2 usage or input error.
"""
from __future__ import annotations

import argparse
import json
import logging
import os
import sys
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .analytic import decompose, reconstruct, reconstruct_from_orientation, split_exceptional
from .io import (ArchiveError, FieldArchive, ImageFormatError, export_maps, load_field, load_image,
                 normalize_preview, save_field, save_pgm)
from .multipliers import MultiplierError, ParametricParams, build, classify, field_export
from .spectral import FrequencyGrid, MultivectorField
from .verify import CRITERIA

log = logging.getLogger("clifsig")

MULTIPLIERS = ("hahn", "hypercomplex", "modified-hypercomplex", "monogenic", "parametric", "random", "scalar-set-1d")
PARAM_FIELDS = ("A", "A1", "A2", "B1", "B2", "alpha1", "alpha2", "beta1", "beta2", "s_rule")
ARCHIVE_NAME = "analytic.fld"
TOGGLE_TOL = 1e-8
GENERIC_TOL = 1e-10

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


@dataclass
class RunConfig:
    command: str
    input: Path | None = None
    output: Path | None = None
    multiplier: str | None = None
    params: dict = field(default_factory=dict)
    seed: int | None = None
    engineering_scale: bool = False
    keep_mean: bool = False
    stride: int = 1
    orientation_only: bool = False
    shape: tuple[int, ...] = (16, 16)

    def __post_init__(self):
        if self.params and self.multiplier != "parametric":
            raise UsageError("parametric parameters are only accepted with --multiplier parametric")
        if self.seed is not None and self.multiplier != "random":
            raise UsageError("--seed is only accepted with --multiplier random")
        if self.seed is not None and self.seed < 0:
            raise UsageError("--seed must be a non-negative integer")
        if self.stride < 1:
            raise UsageError("--stride must be positive")

    def parametric(self) -> ParametricParams | None:
        if self.multiplier != "parametric":
            return None
        return ParametricParams(**self.params)


def emit(obj: dict) -> None:
    sys.stdout.write(json.dumps(obj) + "\n")
    sys.stdout.flush()


def emit_check(check: str, residual: float, tol: float | None, ok: bool | None = None) -> bool:
    if ok is None:
        ok = tol is not None and residual <= tol
    emit({"check": check, "status": "pass" if ok else "fail", "residual": float(residual), "tolerance": tol})
    return ok


def _max_abs(x) -> float:
    x = np.asarray(x)
    return float(np.max(np.abs(x))) if x.size else 0.0


def _pearson(a: np.ndarray, b: np.ndarray) -> float:
    a, b = a.ravel() - a.mean(), b.ravel() - b.mean()
    den = float(np.sqrt(np.dot(a, a) * np.dot(b, b)))
    return float(np.dot(a, b) / den) if den > 0 else 0.0


def _resolved_seed(cfg: RunConfig) -> int | None:
    if cfg.multiplier != "random":
        return None
    return 0 if cfg.seed is None else cfg.seed


def _multiplier(cfg: RunConfig, shape: tuple[int, ...]):
    return build(cfg.multiplier, FrequencyGrid(shape), seed=_resolved_seed(cfg), params=cfg.parametric())


def cmd_analytic(cfg: RunConfig) -> int:
    img = load_image(cfg.input)
    f_raw = img.pixels
    a = _multiplier(cfg, f_raw.shape)
    symmetry = classify(a)
    # analysis always runs on regular content; the removed part is archived
    f, f_exc = split_exceptional(f_raw, a)
    d = decompose(f, a, symmetry)

    ok = emit_check("a^2 = 1 on regular bins", a.square_residual()[0], 1e-12)
    # compare regular content only; exceptional bins are not invertible
    toggle = _max_abs(split_exceptional(reconstruct(d.fH, a), a)[0] - split_exceptional(f, a)[0])
    ok &= emit_check("H[H[f]] = f on regular content", toggle, TOGGLE_TOL)
    if d.is_generic:
        vanish = d.fH_Re if d.kind == "scalar" else d.W
        ok &= emit_check("generic vanishing part", _max_abs(vanish), GENERIC_TOL)
        ok &= emit_check("R cos(theta) = f", _max_abs(d.R * np.cos(d.theta) - f), GENERIC_TOL)

    out = Path(cfg.output)
    files = export_maps(d, out, stride=cfg.stride)
    scale = 2.0 if cfg.engineering_scale else 1.0
    names = d.fH.component_names()
    planes = [("f", f), ("f_exceptional", f_exc)]
    planes += [(f"fH.{n}", d.fH[i]) for i, n in enumerate(names)]
    planes += [(f"fA.{n}", scale * d.fA[i]) for i, n in enumerate(names)]
    if d.is_generic:
        planes += [("R", d.R), ("theta", d.theta), ("vnorm", d.hnorm)]
        if d.vhat is not None:
            planes += [(f"vhat{k + 1}", d.vhat[..., k]) for k in range(3)]
    archive = FieldArchive(
        shape=f.shape,
        components=[n for n, _ in planes],
        planes=np.stack([p for _, p in planes]),
        multiplier=cfg.multiplier,
        seed=_resolved_seed(cfg),
        class_tag=symmetry.value,
        extra={"params": cfg.params, "engineering_scale": cfg.engineering_scale, "keep_mean": cfg.keep_mean},
    )
    archive_path = out / ARCHIVE_NAME
    save_field(archive, archive_path)
    emit({"command": "analytic", "multiplier": cfg.multiplier, "class": symmetry.value,
          "kind": a.kind, "archive": str(archive_path), "files": [str(p) for p in files]})
    return EXIT_OK if ok else EXIT_FAIL


def _multiplier_from_archive(arc: FieldArchive, cfg: RunConfig):
    if cfg.multiplier and cfg.multiplier != arc.multiplier:
        raise UsageError(f"archive/multiplier mismatch: archive was built with {arc.multiplier!r}, "
                         f"got --multiplier {cfg.multiplier!r}")
    if arc.multiplier not in MULTIPLIERS:
        raise UsageError(f"archive names unknown multiplier {arc.multiplier!r}")
    params = arc.extra.get("params") or {}
    rebuilt = RunConfig("reconstruct", multiplier=arc.multiplier, seed=arc.seed, params=params)
    a = _multiplier(rebuilt, arc.shape)
    if classify(a).value != arc.class_tag:
        raise UsageError("archive/multiplier mismatch: symmetry class differs from header")
    return a


def cmd_reconstruct(cfg: RunConfig) -> int:
    path = Path(cfg.input)
    if not path.exists():
        raise UsageError(f"archive not found: {path}")
    arc = load_field(path)
    a = _multiplier_from_archive(arc, cfg)
    names = MultivectorField.zeros(arc.shape).component_names()
    try:
        fH = MultivectorField(np.stack([arc[f"fH.{n}"] for n in names], axis=-1))
    except KeyError as exc:
        raise UsageError(f"archive lacks component {exc}") from None

    original = arc["f"]
    if cfg.orientation_only:
        if "vhat1" not in arc.components:
            raise UsageError("archive has no unit orientation field (needs a generic vector-kind multiplier)")
        vhat = np.stack([arc[f"vhat{k}"] for k in (1, 2, 3)], axis=-1)
        rec = reconstruct_from_orientation(vhat, a)
    else:
        rec = reconstruct(fH, a)
    if cfg.keep_mean or arc.extra.get("keep_mean"):
        rec = rec + arc["f_exceptional"]
        original = original + arc["f_exceptional"]

    out = Path(cfg.output)
    out.mkdir(parents=True, exist_ok=True)
    stem = "orientation_only" if cfg.orientation_only else "reconstructed"
    preview, lo, hi = normalize_preview(rec)
    save_pgm(out / f"{stem}.pgm", preview)
    save_field(FieldArchive(rec.shape, ["f"], rec[None], arc.multiplier, arc.seed, arc.class_tag,
                            {"normalization": {"min": lo, "max": hi}}), out / f"{stem}.fld")

    ok = True
    r = _pearson(rec, original)
    if cfg.orientation_only:
        emit_check("orientation-only Pearson correlation", r, None, ok=bool(np.all(np.isfinite(rec))))
    else:
        ok = emit_check("reconstruction max-abs error", _max_abs(rec - original), TOGGLE_TOL)
        emit_check("reconstruction Pearson correlation", r, None, ok=True)
    emit({"command": "reconstruct", "multiplier": arc.multiplier, "orientation_only": cfg.orientation_only,
          "output": str(out / f"{stem}.pgm")})
    return EXIT_OK if ok else EXIT_FAIL


def cmd_field(cfg: RunConfig) -> int:
    a = _multiplier(cfg, cfg.shape)
    if a.kind != "vector_pseudovector":
        raise UsageError(f"{cfg.multiplier} is a scalar multiplier; no vector field to export")
    out = Path(cfg.output)
    out.parent.mkdir(parents=True, exist_ok=True)
    rows = field_export(a, out)
    emit({"command": "field", "multiplier": cfg.multiplier, "rows": int(len(rows)), "output": str(out)})
    return EXIT_OK


def cmd_selftest(cfg: RunConfig, as_json: bool = False, faults: tuple[str, ...] = ()) -> int:
    start = time.perf_counter()
    failed = []
    for num, title, fn in CRITERIA:
        results = fn(frozenset(faults))
        passed = all(r.passed for r in results)
        if not passed:
            failed.append(num)
        for r in results:
            if as_json:
                emit({"criterion": num, **r.as_dict()})
            elif not r.passed:
                print(f"  FAIL [{num}] {r.check}: residual {r.residual:.3e} (tol {r.tolerance})", file=sys.stderr)
        if not as_json:
            print(f"{'PASS' if passed else 'FAIL'}  {num:2d}. {title}", file=sys.stderr)
    elapsed = time.perf_counter() - start
    if not as_json:
        emit({"command": "selftest", "status": "fail" if failed else "pass",
              "failed": failed, "seconds": round(elapsed, 2)})
    return EXIT_FAIL if failed else EXIT_OK


def _add_multiplier_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--multiplier", "-m", choices=MULTIPLIERS, required=True)
    p.add_argument("--seed", type=int, help="random multiplier seed (multiplier=random only)")
    g = p.add_argument_group("parametric model (multiplier=parametric only)")
    for name in PARAM_FIELDS[:-1]:
        g.add_argument(f"--{name}", type=float, default=None)
    g.add_argument("--s-rule", dest="s_rule", choices=("+1", "-1", "sgn"), default=None,
                   help="sign of the pseudovector part; defaults to +1")


def make_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="clifsig", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analytic", help="decompose an image and export maps plus a field archive")
    _add_multiplier_args(p)
    p.add_argument("--engineering-scale", action="store_true", help="store 2*f_A instead of f_A")
    p.add_argument("--keep-mean", action="store_true",
                   help="mark the archive so reconstruction re-adds the removed exceptional-bin content")
    p.add_argument("--stride", type=int, default=1, help="quiver CSV subsampling stride")
    p.add_argument("input")
    p.add_argument("output", help="output directory")

    p = sub.add_parser("reconstruct", help="recover an image from an analytic archive")
    p.add_argument("--multiplier", "-m", choices=MULTIPLIERS, default=None,
                   help="expected multiplier; must match the archive header")
    p.add_argument("--orientation-only", action="store_true")
    p.add_argument("--keep-mean", action="store_true", help="re-add the exceptional-bin content removed before analysis")
    p.add_argument("input", help="archive written by 'analytic'")
    p.add_argument("output", help="output directory")

    p = sub.add_parser("field", help="export a vector multiplier as a quiver CSV")
    _add_multiplier_args(p)
    p.add_argument("--shape", type=int, nargs=2, default=(16, 16), metavar=("N1", "N2"))
    p.add_argument("output", help="CSV path")

    p = sub.add_parser("selftest", help="run the acceptance checks")
    p.add_argument("--json", action="store_true", help="one JSON object per check")
    p.add_argument("--inject-fault", action="append", default=[], help=argparse.SUPPRESS)
    return parser


def config_from_args(ns: argparse.Namespace) -> RunConfig:
    params = {k: getattr(ns, k) for k in PARAM_FIELDS if getattr(ns, k, None) is not None}
    return RunConfig(
        command=ns.command,
        input=Path(ns.input) if getattr(ns, "input", None) else None,
        output=Path(ns.output) if getattr(ns, "output", None) else None,
        multiplier=getattr(ns, "multiplier", None),
        params=params,
        seed=getattr(ns, "seed", None),
        engineering_scale=getattr(ns, "engineering_scale", False),
        keep_mean=getattr(ns, "keep_mean", False),
        stride=getattr(ns, "stride", 1),
        orientation_only=getattr(ns, "orientation_only", False),
        shape=tuple(getattr(ns, "shape", (16, 16))),
    )


def main(argv: list[str] | None = None) -> int:
    parser = make_parser()
    try:
        ns = parser.parse_args(argv)
    except SystemExit as exc:
        if exc.code not in (0, None):
            emit({"error": "invalid command line", "code": EXIT_USAGE})
            return EXIT_USAGE
        return EXIT_OK
    logging.basicConfig(level=logging.INFO if ns.verbose else logging.WARNING, stream=sys.stderr,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = config_from_args(ns)
        if cfg.command == "analytic":
            return cmd_analytic(cfg)
        if cfg.command == "reconstruct":
            return cmd_reconstruct(cfg)
        if cfg.command == "field":
            return cmd_field(cfg)
        return cmd_selftest(cfg, as_json=ns.json, faults=tuple(ns.inject_fault))
    except (UsageError, ImageFormatError, ArchiveError, MultiplierError, FileNotFoundError,
            PermissionError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        emit({"error": str(exc), "type": type(exc).__name__, "code": EXIT_USAGE})
        return EXIT_USAGE
    except BrokenPipeError:
        # downstream closed stdout (e.g. piped into head)
        sys.stdout = open(os.devnull, "w")
        return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
