"""Image loading, field archives and plot-ready exports."""
from __future__ import annotations

import csv
import json
import os
import struct
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

MAGIC = b"CLIFSIG1"
DTYPE_TAG = "f64-le"


class ImageFormatError(ValueError):
    pass


class ArchiveError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class GrayImage:
    pixels: np.ndarray  # (height, width), values in [0, 1]

    def __post_init__(self):
        p = np.asarray(self.pixels, dtype=np.float64)
        if p.ndim != 2 or 0 in p.shape:
            raise ImageFormatError(f"image must be 2-D with positive size, got shape {p.shape}")
        if not np.all(np.isfinite(p)):
            raise ImageFormatError("image contains non-finite values")
        object.__setattr__(self, "pixels", p)

    @property
    def height(self) -> int:
        return self.pixels.shape[0]

    @property
    def width(self) -> int:
        return self.pixels.shape[1]


def _pgm_tokens(data: bytes, count: int) -> tuple[list[bytes], int]:
    tokens, pos = [], 2
    while len(tokens) < count:
        while pos < len(data) and data[pos : pos + 1].isspace():
            pos += 1
        if pos < len(data) and data[pos : pos + 1] == b"#":
            while pos < len(data) and data[pos : pos + 1] not in (b"\n", b"\r"):
                pos += 1
            continue
        start = pos
        while pos < len(data) and not data[pos : pos + 1].isspace():
            pos += 1
        if start == pos:
            raise ImageFormatError("truncated PGM header")
        tokens.append(data[start:pos])
    # exactly one whitespace byte separates the header from the raster
    return tokens, pos + 1


def _read_pgm(data: bytes) -> GrayImage:
    try:
        (w, h, maxval), offset = _pgm_tokens(data, 3)
        width, height, maxval = int(w), int(h), int(maxval)
    except ValueError as exc:
        if isinstance(exc, ImageFormatError):
            raise
        raise ImageFormatError(f"malformed PGM header: {exc}") from exc
    if width <= 0 or height <= 0:
        raise ImageFormatError("zero dimension in PGM header")
    if not 0 < maxval < 65536:
        raise ImageFormatError(f"invalid PGM maxval {maxval}")
    dtype = np.dtype(np.uint8) if maxval < 256 else np.dtype(">u2")
    need = width * height * dtype.itemsize
    raster = data[offset : offset + need]
    if len(raster) < need:
        raise ImageFormatError(f"truncated PGM raster: expected {need} bytes, got {len(raster)}")
    px = np.frombuffer(raster, dtype=dtype).reshape(height, width).astype(np.float64)
    return GrayImage(px / maxval)


def _read_png(path: Path) -> GrayImage:
    from PIL import Image

    try:
        with Image.open(path) as im:
            im.load()
            mode = im.mode
            if mode == "L":
                return GrayImage(np.asarray(im, dtype=np.float64) / 255.0)
            if mode.startswith("I;16") or mode == "I":
                return GrayImage(np.asarray(im, dtype=np.float64) / 65535.0)
    except ImageFormatError:
        raise
    except Exception as exc:
        raise ImageFormatError(f"cannot decode PNG: {exc}") from exc
    raise ImageFormatError(f"grayscale required, PNG has mode {mode}")


def load_image(path) -> GrayImage:
    """Load an 8/16-bit binary PGM (P5) or grayscale PNG, scaled to [0, 1]."""
    path = Path(path)
    data = path.read_bytes()
    if len(data) < 2:
        raise ImageFormatError(f"truncated image file {path}")
    if data[:2] == b"P5":
        return _read_pgm(data)
    if data[:2] in (b"P6", b"P3", b"P2"):
        raise ImageFormatError("grayscale required: only binary P5 PGM is supported")
    if data[:8] == b"\x89PNG\r\n\x1a\n":
        return _read_png(path)
    raise ImageFormatError("unsupported image format")


def save_pgm(path, pixels8: np.ndarray) -> None:
    pixels8 = np.asarray(pixels8, dtype=np.uint8)
    h, w = pixels8.shape
    with open(path, "wb") as fh:
        fh.write(f"P5\n{w} {h}\n255\n".encode("ascii"))
        fh.write(pixels8.tobytes())


def normalize_preview(values: np.ndarray) -> tuple[np.ndarray, float, float]:
    """Min-max map to 0..255; invert with ``p / 255 * (hi - lo) + lo``."""
    lo, hi = float(np.min(values)), float(np.max(values))
    if hi > lo:
        p = np.rint((values - lo) / (hi - lo) * 255.0)
    else:
        p = np.zeros(values.shape)
    return p.astype(np.uint8), lo, hi


@dataclass(eq=False)
class FieldArchive:
    shape: tuple[int, ...]
    components: list[str]
    planes: np.ndarray  # (len(components), *shape)
    multiplier: str = ""
    seed: int | None = None
    class_tag: str = ""
    extra: dict = field(default_factory=dict)

    def __post_init__(self):
        self.shape = tuple(int(n) for n in self.shape)
        self.planes = np.ascontiguousarray(self.planes, dtype="<f8")
        if self.planes.shape != (len(self.components), *self.shape):
            raise ArchiveError(
                f"planes shape {self.planes.shape} inconsistent with "
                f"{len(self.components)} components of shape {self.shape}"
            )

    def __getitem__(self, name: str) -> np.ndarray:
        try:
            return self.planes[self.components.index(name)]
        except ValueError:
            raise KeyError(name) from None

    def header(self) -> dict:
        return {
            "shape": list(self.shape),
            "components": list(self.components),
            "dtype": DTYPE_TAG,
            "multiplier": self.multiplier,
            "seed": self.seed,
            "class": self.class_tag,
            **self.extra,
        }

    def same_as(self, other: "FieldArchive") -> bool:
        return self.header() == other.header() and self.planes.tobytes() == other.planes.tobytes()


def save_field(archive: FieldArchive, path) -> None:
    head = json.dumps(archive.header(), sort_keys=True).encode("utf-8")
    with open(path, "wb") as fh:
        fh.write(MAGIC)
        fh.write(struct.pack("<I", len(head)))
        fh.write(head)
        fh.write(archive.planes.tobytes())


def load_field(path) -> FieldArchive:
    data = Path(path).read_bytes()
    if data[: len(MAGIC)] != MAGIC:
        raise ArchiveError("bad magic: not a field archive")
    pos = len(MAGIC)
    if len(data) < pos + 4:
        raise ArchiveError("truncated archive header")
    (hlen,) = struct.unpack("<I", data[pos : pos + 4])
    pos += 4
    try:
        head = json.loads(data[pos : pos + hlen].decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise ArchiveError(f"corrupt archive header: {exc}") from exc
    pos += hlen
    if head.get("dtype") != DTYPE_TAG:
        raise ArchiveError(f"unsupported dtype {head.get('dtype')!r}")
    shape = tuple(head["shape"])
    comps = list(head["components"])
    expected = int(np.prod(shape)) * len(comps) * 8
    payload = data[pos:]
    if len(payload) != expected:
        raise ArchiveError(f"payload length mismatch: expected {expected} bytes, got {len(payload)}")
    planes = np.frombuffer(payload, dtype="<f8").reshape(len(comps), *shape).copy()
    extra = {k: v for k, v in head.items()
             if k not in ("shape", "components", "dtype", "multiplier", "seed", "class")}
    return FieldArchive(shape, comps, planes, head.get("multiplier", ""), head.get("seed"),
                        head.get("class", ""), extra)


def _write_quiver(path, vec: np.ndarray, valid: np.ndarray, stride: int) -> int:
    # axis 0 (e1) runs down the rows (y), axis 1 (e2) across the columns (x)
    rows = 0
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(("x", "y", "vx", "vy", "valid"))
        for y in range(0, vec.shape[0], stride):
            for x in range(0, vec.shape[1], stride):
                writer.writerow((x, y, f"{vec[y, x, 1]:.17g}", f"{vec[y, x, 0]:.17g}", int(valid[y, x])))
                rows += 1
    return rows


def export_maps(d, out_dir, stride: int = 1) -> list[Path]:
    """Write PGM previews, a normalization sidecar and quiver CSVs for a decomposition."""
    if stride < 1:
        raise ValueError("stride must be positive")
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    if not os.access(out, os.W_OK):
        raise PermissionError(f"cannot write to {out}")

    maps: dict[str, np.ndarray] = {"f": d.f}
    if d.kind == "scalar":
        maps["fH_Re"], maps["fH_Im"] = d.fH_Re, d.fH_Im
    else:
        for k in range(3):
            maps[f"fH{k + 1}"] = d.V[..., k]
    if d.is_generic:
        maps["R"], maps["theta"], maps["vnorm"] = d.R, d.theta, d.hnorm
        if d.kind != "scalar":
            maps["sigma"], maps["kappa"] = d.sigma, d.kappa

    written, sidecar = [], {}
    for name, values in maps.items():
        p8, lo, hi = normalize_preview(values)
        path = out / f"{name}.pgm"
        save_pgm(path, p8)
        sidecar[name] = {"min": lo, "max": hi}
        written.append(path)

    if d.kind != "scalar" and d.is_generic:
        for name, vec in (("vhat", d.vhat), ("phase_vector", d.phase_vector)):
            path = out / f"{name}.csv"
            _write_quiver(path, vec, d.valid, stride)
            written.append(path)

    side = out / "previews.json"
    side.write_text(json.dumps({"normalization": sidecar, "stride": stride}, indent=2))
    written.append(side)
    return written
