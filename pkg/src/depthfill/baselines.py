"""Non-learned inpainting baselines: smoothness-only optimization and
iterative joint bilateral hole filling."""

import numpy as np

from .errors import SingularSystem, UnfilledPixels
from .images import DepthImage, SolverWeights, count_valid
from .solve import SolveOptions, solve_rows
from .system import LinearSystem, add_data_rows, add_smoothness_rows


def inpaint_smooth(raw, weights=None, solve_options=None):
    """Fill holes by minimizing lambda_d * E_data + lambda_s * E_smooth.

    Shares the completion solver rather than a separate diffusion path, so
    its behavior is consistent with the full method with lambda_n = 0.
    """
    w = weights or SolverWeights()
    if count_valid(raw) == 0:
        raise SingularSystem(0, (0, 0), "no observed depth to inpaint from")
    sys = LinearSystem(raw.height * raw.width, shape=raw.shape)
    add_data_rows(sys, raw, w.lambda_d)
    add_smoothness_rows(sys, w.lambda_s)
    opts = solve_options or SolveOptions()
    if opts.initial_guess is None:
        guess = np.full(sys.n_unknowns, float(np.mean(raw.data[raw.valid])))
        guess[raw.valid.ravel()] = raw.data.ravel()[raw.valid.ravel()]
        from dataclasses import replace
        opts = replace(opts, initial_guess=guess)
    x = solve_rows(sys, opts)
    return DepthImage(x.reshape(raw.shape), np.ones(raw.shape, bool))


def inpaint_joint_bilateral(raw, color, sigma_spatial=8.0, sigma_color=0.1,
                            radius=16, max_passes=8):
    """Fill each hole with a spatially- and color-weighted mean of nearby
    observed depths; repeat over newly filled pixels until done.

    color is (h, w, 3) with intensities in [0, 1].  Observed pixels are
    returned unchanged.  Raises UnfilledPixels if holes remain after
    max_passes.
    """
    color = np.asarray(color, np.float64)
    if color.shape[:2] != raw.shape or color.ndim != 3 or color.shape[2] != 3:
        raise ValueError("color must be (h, w, 3) matching the depth image")
    if sigma_spatial <= 0 or sigma_color <= 0:
        raise ValueError("sigmas must be positive")
    h, w = raw.shape
    depth = raw.data.copy()
    valid = raw.valid.copy()

    offs = [(dx, dy) for dy in range(-radius, radius + 1)
            for dx in range(-radius, radius + 1)
            if (dx, dy) != (0, 0) and dx * dx + dy * dy <= radius * radius]
    offs = np.array(offs)
    sw = np.exp(-(offs[:, 0] ** 2 + offs[:, 1] ** 2)
                / (2.0 * sigma_spatial ** 2))

    for _ in range(max_passes):
        holes = np.nonzero(~valid)
        if len(holes[0]) == 0:
            break
        hy, hx = holes
        num = np.zeros(len(hy))
        den = np.zeros(len(hy))
        for (dx, dy), wsp in zip(offs, sw):
            qx, qy = hx + dx, hy + dy
            inb = (qx >= 0) & (qx < w) & (qy >= 0) & (qy < h)
            i = np.nonzero(inb)[0]
            qx, qy = qx[i], qy[i]
            ok = valid[qy, qx]
            i, qx, qy = i[ok], qx[ok], qy[ok]
            if len(i) == 0:
                continue
            dc = color[hy[i], hx[i]] - color[qy, qx]
            wc = np.exp(-np.einsum("ic,ic->i", dc, dc)
                        / (2.0 * sigma_color ** 2))
            contrib = wsp * wc
            num[i] += contrib * depth[qy, qx]
            den[i] += contrib
        filled = den > 0
        if not np.any(filled):
            break
        depth[hy[filled], hx[filled]] = num[filled] / den[filled]
        valid[hy[filled], hx[filled]] = True

    if not np.all(valid):
        ys, xs = np.nonzero(~valid)
        raise UnfilledPixels([(int(x), int(y)) for y, x in zip(ys, xs)])
    return DepthImage(depth, valid)
