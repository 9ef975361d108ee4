"""File formats: 16-bit millimeter PNG depth, PFM float maps, a one-line
intrinsics text format and CSV metric reports."""

import csv
import struct

import numpy as np
from PIL import Image

from .camera import CameraIntrinsics
from .images import BoundaryMap, DepthImage, NormalMap
from .metrics import DELTA_THRESHOLDS

MAX_DEPTH_M = 65.535
CSV_HEADER = ("method", "n_eval", "rel", "rmse",
              "d105", "d110", "d125", "d125_2", "d125_3")


def write_depth_png(depth, path):
    """Store depth as 16-bit grayscale PNG in millimeters (round half up);
    0 encodes an invalid pixel."""
    mm = np.floor(depth.data * 1000.0 + 0.5)
    mm[~depth.valid] = 0.0
    if np.any(depth.valid & (depth.data > MAX_DEPTH_M)):
        raise ValueError(f"depth exceeds the {MAX_DEPTH_M} m PNG-16 range")
    if np.any(depth.valid & (mm < 1)):
        raise ValueError("valid depth below 0.5 mm cannot be stored")
    img = Image.fromarray(mm.astype(np.uint16))
    img.save(path, format="PNG")


def read_depth_png(path):
    img = Image.open(path)
    arr = np.asarray(img)
    if arr.ndim != 2:
        raise ValueError(f"{path} is not a single-channel depth PNG")
    mm = arr.astype(np.float64)
    valid = mm > 0
    return DepthImage(mm / 1000.0, valid)


def _write_pfm(path, data):
    """data is (h, w) or (h, w, 3) float32-representable; little endian,
    bottom-to-top row order per the PFM convention."""
    data = np.asarray(data, np.float32)
    channels = 1 if data.ndim == 2 else data.shape[2]
    if channels not in (1, 3):
        raise ValueError("PFM supports 1 or 3 channels")
    h, w = data.shape[:2]
    with open(path, "wb") as f:
        f.write(b"PF\n" if channels == 3 else b"Pf\n")
        f.write(f"{w} {h}\n".encode())
        f.write(b"-1.0\n")
        f.write(np.ascontiguousarray(data[::-1]).astype("<f4").tobytes())


def _read_pfm(path):
    with open(path, "rb") as f:
        header = f.readline().strip()
        if header == b"PF":
            channels = 3
        elif header == b"Pf":
            channels = 1
        else:
            raise ValueError(f"{path}: bad PFM header {header!r}")
        w, h = (int(t) for t in f.readline().split())
        scale = float(f.readline())
        fmt = "<f4" if scale < 0 else ">f4"
        raw = f.read(4 * w * h * channels)
        if len(raw) != 4 * w * h * channels:
            raise ValueError(f"{path}: truncated PFM payload")
    shape = (h, w) if channels == 1 else (h, w, channels)
    return np.frombuffer(raw, fmt).reshape(shape)[::-1].astype(np.float64)


def write_normals(normals, path):
    _write_pfm(path, normals.data)


def read_normals(path):
    data = _read_pfm(path)
    if data.ndim != 3:
        raise ValueError(f"{path}: normals PFM must be 3-channel ('PF')")
    return NormalMap(data)


def write_boundary(boundary, path):
    _write_pfm(path, boundary.data)


def read_boundary(path):
    data = _read_pfm(path)
    if data.ndim != 2:
        raise ValueError(f"{path}: boundary PFM must be 1-channel ('Pf')")
    return BoundaryMap(data)


def write_color(color, path):
    _write_pfm(path, color)


def read_color(path):
    data = _read_pfm(path)
    if data.ndim != 3:
        raise ValueError(f"{path}: color PFM must be 3-channel ('PF')")
    return data


def write_derivatives(derivs, path):
    """Derivative maps need 8 channels, stored as raw little-endian float32
    with a one-line text header (not PFM, which caps at 3 channels)."""
    data = np.asarray(derivs.data, np.float32)
    h, w = data.shape[:2]
    with open(path, "wb") as f:
        f.write(f"DDM {w} {h} 8\n".encode())
        f.write(np.ascontiguousarray(data).astype("<f4").tobytes())


def read_derivatives(path):
    from .images import DerivativeMap

    with open(path, "rb") as f:
        header = f.readline().split()
        if len(header) != 4 or header[0] != b"DDM":
            raise ValueError(f"{path}: bad derivative-map header")
        w, h, c = (int(t) for t in header[1:])
        if c != 8:
            raise ValueError(f"{path}: expected 8 channels, got {c}")
        raw = f.read(4 * w * h * c)
    return DerivativeMap(np.frombuffer(raw, "<f4").reshape(h, w, 8)
                         .astype(np.float64))


def write_intrinsics(K, path):
    with open(path, "w") as f:
        f.write(f"{K.fx} {K.fy} {K.cx} {K.cy} {K.width} {K.height}\n")


def read_intrinsics(path):
    with open(path) as f:
        tokens = f.read().split()
    if len(tokens) != 6:
        raise ValueError(f"{path}: expected 6 values, got {len(tokens)}")
    fx, fy, cx, cy = (float(t) for t in tokens[:4])
    w, h = (int(t) for t in tokens[4:])
    return CameraIntrinsics(fx, fy, cx, cy, w, h)


def _fmt(x):
    return f"{x:.6g}"


def write_report_csv(path, rows):
    """rows: iterable of (method_name, MetricsReport)."""
    with open(path, "w", newline="") as f:
        writer = csv.writer(f)
        writer.writerow(CSV_HEADER)
        for name, rep in rows:
            writer.writerow([name, rep.n_eval, _fmt(rep.rel), _fmt(rep.rmse)]
                            + [_fmt(d) for d in rep.delta])
