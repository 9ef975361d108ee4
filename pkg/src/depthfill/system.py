"""Weighted sparse least-squares rows over per-pixel depth unknowns and
assembly of the symmetric positive (semi)definite normal equations.

Every energy term contributes rows r with weight w and right-hand side rhs;
the assembled system is A = sum w * r^T r, b = sum w * rhs * r.  Rows are
stored in vectorized blocks (all rows of one term family share an entry
count), which keeps assembly fast on large grids while still exposing the
individual rows for inspection.
"""

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from .errors import DepthfillError, DimensionMismatch
from .images import DERIVATIVE_OFFSETS

NEIGHBORS_4 = ((1, 0), (-1, 0), (0, 1), (0, -1))


@dataclass(frozen=True)
class LinearRow:
    """One squared term: weight * (sum_i coef_i * x[idx_i] - rhs)^2."""

    entries: tuple
    rhs: float
    weight: float


class LinearSystem:
    """Accumulates rows over n_unknowns = width * height depth values.

    ``shape`` (height, width), when known, lets errors name pixels.
    """

    def __init__(self, n_unknowns, shape=None):
        if n_unknowns <= 0:
            raise ValueError("n_unknowns must be positive")
        self.n_unknowns = int(n_unknowns)
        self.shape = shape
        self._blocks = []

    @property
    def n_rows(self):
        return sum(b[0].shape[0] for b in self._blocks)

    def add_block(self, cols, coefs, rhs, weights):
        """Add m rows sharing an entry count k.  cols/coefs are (m, k),
        rhs and weights are (m,)."""
        cols = np.atleast_2d(np.asarray(cols, np.int64))
        coefs = np.atleast_2d(np.asarray(coefs, np.float64))
        rhs = np.asarray(rhs, np.float64).ravel()
        weights = np.asarray(weights, np.float64).ravel()
        m, k = cols.shape
        if coefs.shape != (m, k) or rhs.shape != (m,) or weights.shape != (m,):
            raise ValueError("inconsistent block shapes")
        if m == 0:
            return
        if k == 0:
            raise ValueError("rows must have at least one entry")
        if cols.min() < 0 or cols.max() >= self.n_unknowns:
            raise ValueError("pixel index out of range")
        if not np.all(np.isfinite(coefs)):
            raise ValueError("row coefficients must be finite")
        if weights.min() < 0:
            raise ValueError("row weights must be nonnegative")
        self._blocks.append((cols, coefs, rhs, weights))

    def add_row(self, entries, rhs, weight):
        idx = [i for i, _ in entries]
        coef = [c for _, c in entries]
        self.add_block([idx], [coef], [rhs], [weight])

    def iter_rows(self):
        for cols, coefs, rhs, weights in self._blocks:
            for i in range(cols.shape[0]):
                yield LinearRow(
                    tuple(zip(cols[i].tolist(), coefs[i].tolist())),
                    float(rhs[i]),
                    float(weights[i]),
                )

    def energy(self, x):
        """sum w * (r.x - rhs)^2 evaluated directly from the rows."""
        total = 0.0
        for cols, coefs, rhs, weights in self._blocks:
            res = np.einsum("mk,mk->m", coefs, x[cols]) - rhs
            total += float(np.dot(weights, res * res))
        return total

    def pixel_of(self, index):
        if self.shape is None:
            return None
        h, w = self.shape
        return (int(index % w), int(index // w))


def _flat(xs, ys, width):
    return ys * width + xs


def add_data_rows(sys, depth, weight):
    """One row per observed pixel tying D(p) to the raw value D0(p)."""
    if sys.shape is not None and depth.shape != sys.shape:
        raise DimensionMismatch("depth image does not match system shape")
    if depth.height * depth.width != sys.n_unknowns:
        raise DimensionMismatch("depth size does not match n_unknowns")
    ys, xs = np.nonzero(depth.valid)
    m = len(ys)
    if m:
        idx = _flat(xs, ys, depth.width)
        sys.add_block(idx[:, None], np.ones((m, 1)), depth.data[ys, xs],
                      np.full(m, float(weight)))
    return m


def add_smoothness_rows(sys, weight):
    """D(p) - D(q) = 0 for every unordered 4-neighbor pair."""
    if sys.shape is None:
        raise ValueError("system has no grid shape")
    h, w = sys.shape
    count = 0
    for dx, dy in ((1, 0), (0, 1)):
        xs, ys = np.meshgrid(np.arange(w - dx), np.arange(h - dy))
        p = _flat(xs.ravel(), ys.ravel(), w)
        q = _flat(xs.ravel() + dx, ys.ravel() + dy, w)
        m = len(p)
        if m:
            sys.add_block(
                np.stack([p, q], axis=1),
                np.tile([1.0, -1.0], (m, 1)),
                np.zeros(m),
                np.full(m, float(weight)),
            )
        count += m
    return count


def add_normal_rows(sys, normals, boundary, K, weight):
    """Linearized normal-consistency rows.

    For each pixel p with a usable normal and each in-bounds 4-neighbor q:
    <X(q) - X(p), N(p)> = 0 with X(.) = D(.) * ray(.), i.e. coefficient
    <r(q), N(p)> on q and -<r(p), N(p)> on p.  When a boundary map is given,
    the row weight is scaled by (1 - B(p))^2 so that constraints vanish on
    occlusion boundaries.
    """
    from .camera import ray_grid  # local import to avoid cycle at module load

    if sys.shape is not None and normals.shape != sys.shape:
        raise DimensionMismatch("normal map does not match system shape")
    if boundary is not None and boundary.shape != normals.shape:
        raise DimensionMismatch("boundary map does not match normal map")
    h, w = normals.shape
    if (K.height, K.width) != (h, w):
        raise DimensionMismatch("intrinsics do not match normal map")
    norms = np.linalg.norm(normals.data, axis=2)
    usable = norms > 0.5
    if np.any(usable & (np.abs(norms - 1.0) > 1e-3)):
        raise ValueError("normal map contains non-unit normals")

    rays = ray_grid(K)
    rp_dot_n = np.einsum("hwc,hwc->hw", rays, normals.data)
    if boundary is not None:
        bw = np.clip(1.0 - boundary.data, 0.0, 1.0) ** 2
    else:
        bw = np.ones((h, w))

    count = 0
    for dx, dy in NEIGHBORS_4:
        x0, x1 = max(0, -dx), w - max(0, dx)
        y0, y1 = max(0, -dy), h - max(0, dy)
        xs, ys = np.meshgrid(np.arange(x0, x1), np.arange(y0, y1))
        xs, ys = xs.ravel(), ys.ravel()
        keep = usable[ys, xs]
        xs, ys = xs[keep], ys[keep]
        if len(xs) == 0:
            continue
        qx, qy = xs + dx, ys + dy
        cq = np.einsum("ic,ic->i", rays[qy, qx], normals.data[ys, xs])
        cp = -rp_dot_n[ys, xs]
        m = len(xs)
        sys.add_block(
            np.stack([_flat(qx, qy, w), _flat(xs, ys, w)], axis=1),
            np.stack([cq, cp], axis=1),
            np.zeros(m),
            float(weight) * bw[ys, xs],
        )
        count += m
    return count


def add_derivative_rows(sys, derivs, weight):
    """D(q) - D(p) = delta_dir(p) for each of the 8 compass neighbors."""
    if sys.shape is not None and derivs.shape != sys.shape:
        raise DimensionMismatch("derivative map does not match system shape")
    h, w = derivs.shape
    count = 0
    for i, (dx, dy) in enumerate(DERIVATIVE_OFFSETS):
        x0, x1 = max(0, -dx), w - max(0, dx)
        y0, y1 = max(0, -dy), h - max(0, dy)
        xs, ys = np.meshgrid(np.arange(x0, x1), np.arange(y0, y1))
        xs, ys = xs.ravel(), ys.ravel()
        m = len(xs)
        if m == 0:
            continue
        qx, qy = xs + dx, ys + dy
        sys.add_block(
            np.stack([_flat(qx, qy, w), _flat(xs, ys, w)], axis=1),
            np.tile([1.0, -1.0], (m, 1)),
            derivs.data[ys, xs, i],
            np.full(m, float(weight)),
        )
        count += m
    return count


def assemble(sys):
    """Assemble (A, b) with A = sum w r^T r (sparse CSR, exactly symmetric)
    and b = sum w rhs r.  Zero-weight rows contribute nothing; the
    accumulation order is fixed, so results are deterministic."""
    if sys.n_rows == 0:
        raise DepthfillError("cannot assemble an empty system")
    n = sys.n_unknowns
    ii, jj, vv = [], [], []
    b = np.zeros(n)
    for cols, coefs, rhs, weights in sys._blocks:
        wc = coefs * weights[:, None]
        k = cols.shape[1]
        for a in range(k):
            for c in range(k):
                ii.append(cols[:, a])
                jj.append(cols[:, c])
                vv.append(wc[:, a] * coefs[:, c])
            np.add.at(b, cols[:, a], wc[:, a] * rhs)
    A = sp.coo_matrix(
        (np.concatenate(vv), (np.concatenate(ii), np.concatenate(jj))),
        shape=(n, n),
    ).tocsr()
    A.sum_duplicates()
    # mirrored triplets make A symmetric up to summation order; this
    # averaging is exact when they already agree and repairs the last ulp
    # when they do not
    A = (A + A.T) * 0.5
    return A, b
