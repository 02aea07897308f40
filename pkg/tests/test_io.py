import csv
import json
import struct

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays
from PIL import Image

from clifsig.analytic import decompose, split_exceptional
from clifsig.io import (
    MAGIC,
    ArchiveError,
    FieldArchive,
    ImageFormatError,
    export_maps,
    load_field,
    load_image,
    normalize_preview,
    save_field,
    save_pgm,
)
from clifsig.multipliers import make_hahn, make_hypercomplex, make_monogenic
from clifsig.spectral import FrequencyGrid


def test_pgm_2x2(tmp_path):
    p = tmp_path / "a.pgm"
    p.write_bytes(b"P5\n2 2\n255\n" + bytes([0, 255, 128, 64]))
    img = load_image(p)
    assert img.pixels.shape == (2, 2)
    assert np.array_equal(img.pixels.ravel(), [0.0, 1.0, 128 / 255, 64 / 255])


def test_pgm_with_comment_and_16bit(tmp_path):
    p = tmp_path / "b.pgm"
    raster = np.array([[0, 1000], [65535, 7]], dtype=">u2").tobytes()
    p.write_bytes(b"P5\n# made by hand\n2 2\n65535\n" + raster)
    img = load_image(p)
    assert np.array_equal(img.pixels, np.array([[0, 1000], [65535, 7]]) / 65535)


def test_empty_file_truncated(tmp_path):
    p = tmp_path / "empty.pgm"
    p.write_bytes(b"")
    with pytest.raises(ImageFormatError, match="truncated"):
        load_image(p)


def test_short_raster_truncated(tmp_path):
    p = tmp_path / "short.pgm"
    p.write_bytes(b"P5\n4 4\n255\n" + bytes(10))
    with pytest.raises(ImageFormatError, match="truncated"):
        load_image(p)


def test_zero_dimension(tmp_path):
    p = tmp_path / "z.pgm"
    p.write_bytes(b"P5\n0 4\n255\n")
    with pytest.raises(ImageFormatError, match="zero dimension"):
        load_image(p)


def test_png_color_rejected(tmp_path):
    p = tmp_path / "c.png"
    Image.new("RGB", (4, 3), (10, 20, 30)).save(p)
    with pytest.raises(ImageFormatError, match="grayscale required"):
        load_image(p)


def test_png_gray_8_and_16(tmp_path):
    p8 = tmp_path / "g8.png"
    a8 = np.array([[0, 51], [255, 102]], dtype=np.uint8)
    Image.fromarray(a8).save(p8)
    assert np.array_equal(load_image(p8).pixels, a8 / 255.0)
    p16 = tmp_path / "g16.png"
    a16 = np.array([[0, 4000], [65535, 12]], dtype=np.uint16)
    Image.fromarray(a16).save(p16)
    assert np.allclose(load_image(p16).pixels, a16 / 65535.0)


def test_unknown_format(tmp_path):
    p = tmp_path / "x.bin"
    p.write_bytes(b"GIF89a....")
    with pytest.raises(ImageFormatError):
        load_image(p)


def test_archive_half_encoding(tmp_path):
    arc = FieldArchive((1, 1), ["f"], np.array([[[0.5]]]))
    path = tmp_path / "h.fld"
    save_field(arc, path)
    data = path.read_bytes()
    assert data.startswith(MAGIC)
    (hlen,) = struct.unpack("<I", data[8:12])
    head = json.loads(data[12 : 12 + hlen])
    assert head["shape"] == [1, 1] and head["components"] == ["f"]
    assert data[12 + hlen :] == struct.pack("<d", 0.5)


def test_archive_corrupted_length(tmp_path):
    arc = FieldArchive((2, 3), ["a", "b"], np.arange(12.0).reshape(2, 2, 3))
    path = tmp_path / "c.fld"
    save_field(arc, path)
    path.write_bytes(path.read_bytes()[:-5])
    with pytest.raises(ArchiveError, match="expected 96 bytes, got 91"):
        load_field(path)


def test_archive_bad_magic(tmp_path):
    path = tmp_path / "m.fld"
    path.write_bytes(b"NOTMAGIC" + bytes(20))
    with pytest.raises(ArchiveError, match="magic"):
        load_field(path)


def test_archive_shape_check():
    with pytest.raises(ArchiveError):
        FieldArchive((2, 2), ["a"], np.zeros((2, 2, 2)))


@settings(max_examples=30, deadline=None)
@given(
    st.tuples(st.integers(1, 6), st.integers(1, 6)),
    st.integers(1, 4),
    st.integers(0, 2**16),
    st.one_of(st.none(), st.integers(0, 2**32 - 1)),
)
def test_archive_round_trip_bitwise(tmp_path_factory, shape, ncomp, seed, rseed):
    rng = np.random.default_rng(seed)
    planes = rng.standard_normal((ncomp, *shape))
    planes.flat[0] = -0.0
    arc = FieldArchive(shape, [f"c{i}" for i in range(ncomp)], planes, "random", rseed, "ordinary",
                       {"params": {"A": 1.5}})
    path = tmp_path_factory.mktemp("arc") / "r.fld"
    save_field(arc, path)
    back = load_field(path)
    assert back.same_as(arc)
    save_field(back, path.with_suffix(".2"))
    assert path.read_bytes() == path.with_suffix(".2").read_bytes()


def test_decomposition_archive_round_trip(tmp_path):
    a = make_monogenic(FrequencyGrid((8, 8)))
    d = decompose(np.random.default_rng(0).standard_normal((8, 8)), a)
    arc = FieldArchive((8, 8), d.fH.component_names(), np.moveaxis(d.fH.coeffs, -1, 0), "monogenic")
    save_field(arc, tmp_path / "d.fld")
    back = load_field(tmp_path / "d.fld")
    assert back.planes.tobytes() == arc.planes.tobytes()


@settings(max_examples=50, deadline=None)
@given(arrays(np.float64, (5, 7), elements=st.floats(-1e6, 1e6, allow_nan=False)))
def test_preview_invertible(values):
    p8, lo, hi = normalize_preview(values)
    back = p8 / 255.0 * (hi - lo) + lo
    assert np.abs(back - values).max() <= (hi - lo) / 255.0 + 1e-9 * max(1.0, abs(lo), abs(hi))


def test_save_pgm_round_trip(tmp_path):
    px = np.arange(12, dtype=np.uint8).reshape(3, 4) * 20
    save_pgm(tmp_path / "p.pgm", px)
    assert np.array_equal(load_image(tmp_path / "p.pgm").pixels, px / 255.0)


def _zero_mean(shape, a, seed=0):
    return split_exceptional(np.random.default_rng(seed).standard_normal(shape), a)[0]


def test_export_monogenic_files(tmp_path):
    a = make_monogenic(FrequencyGrid((16, 16)))
    d = decompose(_zero_mean((16, 16), a), a)
    files = {p.name for p in export_maps(d, tmp_path)}
    for name in ["R.pgm", "theta.pgm", "vhat.csv", "phase_vector.csv", "fH1.pgm", "fH2.pgm", "vnorm.pgm"]:
        assert name in files
    side = json.loads((tmp_path / "previews.json").read_text())
    lo, hi = side["normalization"]["R"]["min"], side["normalization"]["R"]["max"]
    r8 = load_image(tmp_path / "R.pgm").pixels
    assert np.abs(r8 * (hi - lo) + lo - d.R).max() <= (hi - lo) / 255.0 + 1e-12


def test_export_constant_image(tmp_path):
    a = make_monogenic(FrequencyGrid((8, 8)))
    d = decompose(np.full((8, 8), 0.25), a)
    export_maps(d, tmp_path)
    r = load_image(tmp_path / "R.pgm").pixels
    assert np.all(r == r[0, 0])
    with open(tmp_path / "vhat.csv") as fh:
        rows = list(csv.DictReader(fh))
    assert len(rows) == 64
    assert all(row["valid"] == "0" for row in rows)


def test_export_stride(tmp_path):
    a = make_monogenic(FrequencyGrid((64, 64)))
    d = decompose(_zero_mean((64, 64), a), a)
    export_maps(d, tmp_path, stride=4)
    with open(tmp_path / "vhat.csv") as fh:
        rows = list(csv.DictReader(fh))
    assert len(rows) == 256
    r = rows[17]
    y, x = int(r["y"]), int(r["x"])
    assert (y, x) == (4, 4)
    assert float(r["vx"]) == d.vhat[y, x, 1] and float(r["vy"]) == d.vhat[y, x, 0]


def test_export_scalar_and_hypercomplex(tmp_path):
    g = FrequencyGrid((8, 8))
    h = make_hahn(g)
    names = {p.name for p in export_maps(decompose(_zero_mean((8, 8), h), h), tmp_path / "h")}
    assert {"fH_Re.pgm", "fH_Im.pgm"} <= names and "R.pgm" not in names
    hc = make_hypercomplex(g)
    names = {p.name for p in export_maps(decompose(_zero_mean((8, 8), hc), hc), tmp_path / "hc")}
    assert {"fH3.pgm", "sigma.pgm", "kappa.pgm"} <= names


def test_export_bad_stride(tmp_path):
    a = make_monogenic(FrequencyGrid((8, 8)))
    with pytest.raises(ValueError):
        export_maps(decompose(np.zeros((8, 8)), a), tmp_path, stride=0)
