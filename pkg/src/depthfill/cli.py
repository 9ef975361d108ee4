"""Command-line interface: synthetic data generation, completion, baselines,
evaluation, and the sparsity / representation experiment harnesses."""

import csv
import functools
from pathlib import Path

import click
import numpy as np

from . import fileio
from .baselines import inpaint_joint_bilateral, inpaint_smooth
from .camera import derivatives_from_depth
from .complete import BOTH, DERIVATIVES, NORMALS, CompletionConfig, complete_depth
from .errors import DepthfillError
from .images import DepthImage, SolverWeights, count_valid
from .metrics import ALL, OBSERVED, UNOBSERVED, MetricsReport, depth_metrics
from .solve import SolveOptions
from .synth import (
    Box,
    HoleSpec,
    Plane,
    Scene,
    Sphere,
    apply_holes,
    default_intrinsics,
    perturb_normals,
    render_color,
    render_scene,
    scene_by_name,
    standard_suite,
)

_REP_FLAGS = {"normal": NORMALS, "deriv": DERIVATIVES, "both": BOTH}


def parse_scene_file(path):
    """One primitive per line:

        plane  nx ny nz offset [r g b]
        sphere cx cy cz radius [r g b]
        box    xmin ymin zmin xmax ymax zmax [r g b]

    '#' starts a comment.  The plane satisfies n . X = offset.
    """
    prims = []
    for lineno, line in enumerate(Path(path).read_text().splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        tok = line.split()
        kind, vals = tok[0].lower(), [float(t) for t in tok[1:]]

        def split(n):
            if len(vals) == n:
                return vals, (0.5, 0.5, 0.5)
            if len(vals) == n + 3:
                return vals[:n], tuple(vals[n:])
            raise ValueError(
                f"{path}:{lineno}: expected {n} or {n + 3} numbers "
                f"after '{kind}'")

        name = f"{kind}{len(prims)}"
        if kind == "plane":
            v, albedo = split(4)
            prims.append(Plane(tuple(v[:3]), v[3], name, albedo))
        elif kind == "sphere":
            v, albedo = split(4)
            prims.append(Sphere(tuple(v[:3]), v[3], name, albedo))
        elif kind == "box":
            v, albedo = split(6)
            prims.append(Box(tuple(v[:3]), tuple(v[3:6]), name, albedo))
        else:
            raise ValueError(f"{path}:{lineno}: unknown primitive {kind!r}")
    if not prims:
        raise ValueError(f"{path}: no primitives found")
    return Scene(prims)


def parse_hole_spec(text):
    """Grammar: keep:N[:SEED] | drop:F[:SEED] | rects:x,y,w,h[;...] |
    graze:MAX_DEG | far:MAX_M"""
    parts = text.split(":")
    kind = parts[0]
    if kind == "keep":
        seed = int(parts[2]) if len(parts) > 2 else 0
        return HoleSpec("random-keep-n", n=int(parts[1]), seed=seed)
    if kind == "drop":
        seed = int(parts[2]) if len(parts) > 2 else 0
        return HoleSpec("random-drop-fraction", fraction=float(parts[1]),
                        seed=seed)
    if kind == "rects":
        rects = tuple(tuple(int(v) for v in r.split(","))
                      for r in parts[1].split(";"))
        return HoleSpec("rectangles", rectangles=rects)
    if kind == "graze":
        return HoleSpec("grazing-angle", max_angle_deg=float(parts[1]))
    if kind == "far":
        return HoleSpec("far-range", max_depth_m=float(parts[1]))
    raise ValueError(f"unknown hole spec {text!r}")


def _friendly_errors(fn):
    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except (DepthfillError, ValueError, KeyError, OSError) as e:
            raise click.ClickException(str(e)) from e
    return wrapper


@click.group()
def main():
    """Depth completion toolkit."""


def _write_entry(outdir, name, scene, K, holespec):
    depth, normals, boundary = render_scene(scene, K)
    raw = apply_holes(depth, holespec, normals, K)
    fileio.write_depth_png(raw, outdir / f"{name}_depth.png")
    fileio.write_depth_png(depth, outdir / f"{name}_gt.png")
    fileio.write_normals(normals, outdir / f"{name}_normals.pfm")
    fileio.write_boundary(boundary, outdir / f"{name}_boundary.pfm")
    fileio.write_color(render_color(scene, K), outdir / f"{name}_color.pfm")
    fileio.write_intrinsics(K, outdir / f"{name}_intrinsics.txt")


@main.command()
@click.option("--suite", type=int, default=None,
              help="Write the full standard suite for this seed.")
@click.option("--scene", "scene_file", type=click.Path(exists=True),
              default=None, help="Scene description file to render.")
@click.option("--holes", default="drop:0.5:0", help="Hole spec to apply.")
@click.option("--size", default="128x128", help="WxH for --scene mode.")
@click.option("--out", required=True, type=click.Path())
@_friendly_errors
def synth(suite, scene_file, holes, size, out):
    """Render synthetic benchmark data to a directory."""
    outdir = Path(out)
    outdir.mkdir(parents=True, exist_ok=True)
    if (suite is None) == (scene_file is None):
        raise click.ClickException("pass exactly one of --suite / --scene")
    if suite is not None:
        for e in standard_suite(suite):
            _write_entry(outdir, e.name, e.scene, e.K, e.holes)
        click.echo(f"wrote {len(standard_suite(suite))} entries to {outdir}")
    else:
        w, h = (int(t) for t in size.lower().split("x"))
        scene = parse_scene_file(scene_file)
        name = Path(scene_file).stem
        _write_entry(outdir, name, scene, default_intrinsics(w, h),
                     parse_hole_spec(holes))
        click.echo(f"wrote entry {name} to {outdir}")


def _parse_anchor(text):
    u, v, d = text.split(",")
    return ((int(u), int(v)), float(d))


@main.command()
@click.option("--depth", required=True, type=click.Path(exists=True))
@click.option("--normals", type=click.Path(exists=True), default=None)
@click.option("--boundary", type=click.Path(exists=True), default=None)
@click.option("--derivs", type=click.Path(exists=True), default=None)
@click.option("--intrinsics", required=True, type=click.Path(exists=True))
@click.option("--out", required=True, type=click.Path())
@click.option("--rep", type=click.Choice(list(_REP_FLAGS)), default="normal")
@click.option("--lambda-d", type=float, default=1000.0)
@click.option("--lambda-n", type=float, default=1.0)
@click.option("--lambda-s", type=float, default=1e-3)
@click.option("--lambda-dd", type=float, default=1.0)
@click.option("--no-boundary-weight", is_flag=True)
@click.option("--anchor", default=None, help="u,v,depth_m")
@click.option("--method", type=click.Choice(["cg", "direct"]), default="cg")
@_friendly_errors
def complete(depth, normals, boundary, derivs, intrinsics, out, rep,
             lambda_d, lambda_n, lambda_s, lambda_dd, no_boundary_weight,
             anchor, method):
    """Complete a depth image from predicted maps."""
    raw = fileio.read_depth_png(depth)
    n = fileio.read_normals(normals) if normals else None
    b = fileio.read_boundary(boundary) if boundary else None
    dd = fileio.read_derivatives(derivs) if derivs else None
    K = fileio.read_intrinsics(intrinsics)
    cfg = CompletionConfig(
        representation=_REP_FLAGS[rep],
        weights=SolverWeights(lambda_d, lambda_n, lambda_s, lambda_dd,
                              not no_boundary_weight),
        anchor=_parse_anchor(anchor) if anchor else None,
        solve_options=SolveOptions(method=method),
    )
    result = complete_depth(raw, n, b, dd, K, cfg)
    fileio.write_depth_png(result, out)
    click.echo(f"completed {count_valid(raw)} observed pixels -> {out}")


@main.command()
@click.option("--method", type=click.Choice(["smooth", "bilateral"]),
              required=True)
@click.option("--depth", required=True, type=click.Path(exists=True))
@click.option("--color", type=click.Path(exists=True), default=None)
@click.option("--out", required=True, type=click.Path())
@click.option("--lambda-d", type=float, default=1000.0)
@click.option("--lambda-s", type=float, default=1e-3)
@click.option("--sigma-spatial", type=float, default=8.0)
@click.option("--sigma-color", type=float, default=0.1)
@click.option("--radius", type=int, default=16)
@click.option("--max-passes", type=int, default=8)
@_friendly_errors
def baseline(method, depth, color, out, lambda_d, lambda_s, sigma_spatial,
             sigma_color, radius, max_passes):
    """Run an inpainting baseline."""
    raw = fileio.read_depth_png(depth)
    if method == "smooth":
        result = inpaint_smooth(
            raw, SolverWeights(lambda_d=lambda_d, lambda_n=0.0,
                               lambda_s=lambda_s))
    else:
        if color is None:
            raise click.ClickException("bilateral baseline needs --color")
        result = inpaint_joint_bilateral(raw, fileio.read_color(color),
                                         sigma_spatial, sigma_color,
                                         radius, max_passes)
    fileio.write_depth_png(result, out)
    click.echo(f"wrote {out}")


@main.command("eval")
@click.option("--pred", required=True, type=click.Path(exists=True))
@click.option("--truth", required=True, type=click.Path(exists=True))
@click.option("--raw", type=click.Path(exists=True), default=None)
@click.option("--pixels", type=click.Choice([OBSERVED, UNOBSERVED, ALL]),
              default=ALL)
@click.option("--out", required=True, type=click.Path())
@click.option("--method-name", default=None,
              help="Value of the CSV method column (default: pred stem).")
@_friendly_errors
def eval_cmd(pred, truth, raw, pixels, out, method_name):
    """Evaluate a completed depth image against ground truth."""
    p = fileio.read_depth_png(pred)
    t = fileio.read_depth_png(truth)
    raw_mask = fileio.read_depth_png(raw).valid if raw else None
    rep = depth_metrics(p, t, pixels, raw_mask)
    name = method_name or Path(pred).stem
    fileio.write_report_csv(out, [(name, rep)])
    click.echo(f"rel={rep.rel:.6g} rmse={rep.rmse:.6g} n={rep.n_eval}")


def _resolve_sweep_entry(name):
    scene_key, _, res = name.rpartition("_")
    w, h = (int(t) for t in res.lower().split("x"))
    return scene_by_name(scene_key), default_intrinsics(w, h)


@main.command("sweep-sparsity")
@click.option("--suite-entry", required=True,
              help="Scene and resolution, e.g. boxroom_320x256.")
@click.option("--samples", default="20,50,100,200,500,1000,2000",
              help="Comma list of sample counts; 'full' = all sensor pixels.")
@click.option("--seed", type=int, default=0)
@click.option("--sigma-deg", type=float, default=10.0,
              help="Normal perturbation (degrees) emulating prediction error.")
@click.option("--depth-noise", type=float, default=0.005,
              help="Multiplicative sensor depth noise (relative std).")
@click.option("--method", type=click.Choice(["cg", "direct"]),
              default="direct")
@click.option("--out", required=True, type=click.Path())
@_friendly_errors
def sweep_sparsity(suite_entry, samples, seed, sigma_deg, depth_noise,
                   method, out):
    """Depth accuracy vs number of observed depth samples.

    The sensor mask drops half the rendered pixels and the kept measurements
    carry multiplicative noise; each sweep point keeps a nested random subset
    of the remaining sensor pixels as input.  Metrics are reported on the
    fixed sensor-observed and never-observed splits.
    """
    scene, K = _resolve_sweep_entry(suite_entry)
    truth, normals, boundary = render_scene(scene, K)
    sensor = apply_holes(truth, HoleSpec("random-drop-fraction", fraction=0.5,
                                         seed=seed))
    if depth_noise > 0:
        rng = np.random.default_rng(seed + 3)
        noisy = truth.data * (1 + rng.normal(0, depth_noise, truth.shape))
        sensor = DepthImage(noisy, sensor.valid)
    if sigma_deg > 0:
        normals = perturb_normals(normals, sigma_deg, seed + 1)
    n_sensor = count_valid(sensor)
    counts = []
    for tok in samples.split(","):
        counts.append(n_sensor if tok.strip() == "full" else int(tok))
    rows = []
    for n in counts:
        raw = apply_holes(sensor, HoleSpec("random-keep-n", n=n, seed=seed + 2))
        cfg = CompletionConfig(solve_options=SolveOptions(method=method))
        result = complete_depth(raw, normals, boundary, None, K, cfg)
        m_obs = depth_metrics(result, truth, OBSERVED, sensor.valid)
        m_un = depth_metrics(result, truth, UNOBSERVED, sensor.valid)
        rows.append((min(n, n_sensor), m_obs, m_un))
    with open(out, "w", newline="") as f:
        writer = csv.writer(f)
        writer.writerow(["n_samples", "rel_observed", "rmse_observed",
                         "rel_unobserved", "rmse_unobserved"])
        for n, mo, mu in rows:
            writer.writerow([n] + [f"{v:.6g}" for v in
                                   (mo.rel, mo.rmse, mu.rel, mu.rmse)])
    click.echo(f"wrote {len(rows)} sweep rows to {out}")


def _mean_report(reports):
    return MetricsReport(
        rel=float(np.mean([r.rel for r in reports])),
        rmse=float(np.mean([r.rmse for r in reports])),
        delta=tuple(float(np.mean([r.delta[i] for r in reports]))
                    for i in range(5)),
        n_eval=int(sum(r.n_eval for r in reports)),
    )


@main.command("ablate-rep")
@click.option("--suite", "seed", type=int, required=True)
@click.option("--sizes", default="64,128",
              help="Comma list restricting suite resolutions.")
@click.option("--sigma-deg", type=float, default=10.0)
@click.option("--deriv-noise-m", type=float, default=0.01)
@click.option("--method", type=click.Choice(["cg", "direct"]), default="cg")
@click.option("--out", required=True, type=click.Path())
@_friendly_errors
def ablate_rep(seed, sizes, sigma_deg, deriv_noise_m, method, out):
    """Representation / boundary ablation plus baselines, averaged over the
    standard suite (unobserved pixels)."""
    keep_sizes = {int(t) for t in sizes.split(",")}
    entries = [e for e in standard_suite(seed)
               if e.K.width in keep_sizes]
    if not entries:
        raise click.ClickException(f"no suite entries at sizes {sizes}")
    configs = [(f"{rep_tag}{'+B' if use_b else ''}", rep, use_b)
               for rep_tag, rep in (("DD", DERIVATIVES), ("N+DD", BOTH),
                                    ("N", NORMALS))
               for use_b in (False, True)]
    collected = {name: [] for name, _, _ in configs}
    collected["smooth"] = []
    collected["bilateral"] = []
    for i, e in enumerate(entries):
        truth, normals, boundary = render_scene(e.scene, e.K)
        raw = apply_holes(truth, e.holes, normals, e.K)
        noisy_n = perturb_normals(normals, sigma_deg, seed + 100 + i)
        derivs = derivatives_from_depth(truth)
        rng = np.random.default_rng(seed + 200 + i)
        from .images import DerivativeMap
        derivs = DerivativeMap(derivs.data
                               + rng.normal(0, deriv_noise_m,
                                            derivs.data.shape))
        for name, rep, use_b in configs:
            cfg = CompletionConfig(
                representation=rep,
                weights=SolverWeights(use_boundary_weight=use_b),
                solve_options=SolveOptions(method=method))
            result = complete_depth(raw, noisy_n, boundary, derivs, e.K, cfg)
            collected[name].append(
                depth_metrics(result, truth, UNOBSERVED, raw.valid))
        smooth = inpaint_smooth(raw)
        collected["smooth"].append(
            depth_metrics(smooth, truth, UNOBSERVED, raw.valid))
        bilat = inpaint_joint_bilateral(raw, render_color(e.scene, e.K))
        collected["bilateral"].append(
            depth_metrics(bilat, truth, UNOBSERVED, raw.valid))
    fileio.write_report_csv(
        out, [(name, _mean_report(reps)) for name, reps in collected.items()])
    click.echo(f"wrote ablation over {len(entries)} entries to {out}")


if __name__ == "__main__":
    main()
