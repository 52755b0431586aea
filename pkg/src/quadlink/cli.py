"""``linkage`` command line: quad and arm analyses with JSON/CSV/SVG output."""
from __future__ import annotations

import math
import sys
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable

import click
import numpy as np

from . import __version__
from . import arm as am
from . import quad as qm
from .emit import (
    DEFAULT_PRECISION,
    Panel,
    check_precision,
    dumps_csv,
    dumps_json,
    render_svg,
    torus_panel,
)
from .geom import TWO_PI, config_cross_ratio, signed_area, uniformizer
from .torus import index_to_angle, torus_grid, zero_contours

EXIT_INVALID = 2
EXIT_NONGENERIC = 3


class CliError(click.ClickException):
    def __init__(self, message: str, code: int):
        super().__init__(message)
        self.exit_code = code


@dataclass
class Bundle:
    """Everything one command produces: the data record plus named artifacts."""

    record: dict
    csv_name: str
    svg_name: str
    files: dict[str, str] = field(default_factory=dict)


def _arc_record(arc: qm.CircleArc) -> dict:
    return {
        "center": arc.center,
        "radius": arc.radius,
        "argLo": arc.arg_lo,
        "argHi": arc.arg_hi,
        "fullCircle": arc.is_full,
        "conjSymmetric": arc.conj_symmetric,
    }


def _signs_record(l: qm.QuadLinkage) -> dict:
    s = qm.grashof_signs(l)
    return {"P1": s.p1, "P2": s.p2, "P3": s.p3, "S": s.s, "longAligned": s.long_aligned, "product": s.product}


def _degenerate_record(rep: qm.DegenerateReport) -> dict:
    return {
        "case": rep.case,
        "topology": rep.topology.value,
        "image": rep.image,
        "radius": rep.radius,
        "circles": [
            {"name": c.name, "kind": c.kind, "sheets": c.sheets, "degree": c.degree, "point": c.point}
            for c in rep.circles
        ],
        "wedgeValue": rep.wedge_value,
        "classifierDecided": rep.classifier_decided,
    }


def quad_classify_record(l: qm.QuadLinkage) -> dict:
    nondeg = qm.is_nondegenerate(l)
    return {
        "command": "quad classify",
        "lengths": list(l.lengths),
        "topology": qm.classify_topology(l).value,
        "nondegenerate": nondeg,
        "connected": qm.is_connected(l),
        "surjective": qm.is_surjective(l) if nondeg else None,
        "signs": _signs_record(l),
    }


def _fold_records(l: qm.QuadLinkage) -> list[dict]:
    out = []
    for cert in qm.critical_points(l):
        V = qm.embed_config(l, cert.point.alpha, cert.point.gamma)
        out.append(
            {
                "alpha": cert.point.alpha,
                "gamma": cert.point.gamma,
                "component": cert.point.component,
                "criticalValue": cert.critical_value,
                "lambdaInv": cert.lambda_inv,
                "secondDeriv": cert.second_deriv,
                "signedArea": signed_area(V),
            }
        )
    return out


def _quad_figure(l: qm.QuadLinkage, comps, arc: qm.CircleArc | None, folds, title: str) -> str:
    size, pad = 260.0, 40.0
    moduli = torus_panel(pad, pad, size, "moduli space (alpha, gamma)")
    rad = l.radius
    half = 1.25 * rad
    rp = Panel.square(2 * pad + size, pad, size, 0j, half, "image of R")
    cp = Panel.square(3 * pad + 2 * size, pad, size, 1 + 0j, half, "image of Cr")
    colors = ("#1f5fbf", "#bf3f1f", "#2f8f2f")
    for k, (al, ga) in enumerate(comps):
        moduli.polyline(al, ga, stroke=colors[k % 3], width=1.2, closed=True, break_jumps=math.pi)
    for p in (rp, cp):
        p.axes()
    circle = np.exp(1j * np.linspace(0, TWO_PI, 361))
    rp.curve(rad * circle, stroke="#999", dash="4,3")
    cp.curve(1 + rad * circle, stroke="#999", dash="4,3")
    if arc is not None:
        rp.curve(arc.sample(361), stroke="#1f5fbf", width=2.0)
        cp.curve(1 - arc.sample(361), stroke="#1f5fbf", width=2.0)
    for f in folds:
        moduli.dot(complex(f["alpha"], f["gamma"]))
        r = rad * np.exp(1j * f["criticalValue"])
        rp.dot(r)
        cp.dot(1 - r)
    return render_svg([moduli, rp, cp], 4 * pad + 3 * size, 2 * pad + size, title)


def quad_image_bundle(l: qm.QuadLinkage, samples: int, precision: int = DEFAULT_PRECISION) -> Bundle:
    title = f"Q({', '.join(f'{x:g}' for x in l.lengths)})"
    if not qm.is_nondegenerate(l):
        rep = qm.degenerate_image_report(l, max(16, samples))
        comps = qm.degenerate_components(l, max(16, samples))
        rows = []
        for name, configs in comps.items():
            for k, V in enumerate(configs):
                r = complex(uniformizer(V))
                rows.append((name, k, r.real, r.imag))
        record = {
            "command": "quad image",
            "lengths": list(l.lengths),
            "topology": qm.classify_topology(l).value,
            "radius": l.radius,
            "degenerate": _degenerate_record(rep),
        }
        csv = dumps_csv(("circle", "index", "r_re", "r_im"), rows, "uniformizer on sampled circles of a degenerate moduli space", precision=precision)
        curves = []
        svg = _quad_figure(l, curves, None, [], title + " (degenerate)")
        return Bundle(record, "samples.csv", "figure.svg", {"samples.csv": csv, "figure.svg": svg})

    comps = qm.trace_moduli(l, samples)
    arc = qm.r_image(l)
    per, total = qm.mapping_degree(l, samples)
    folds = _fold_records(l)
    cyclic = []
    for V in qm.cyclic_configurations(l):
        cyclic.append({"vertices": list(V.vertices), "crossRatio": complex(config_cross_ratio(V)).real})
    record = {
        "command": "quad image",
        "lengths": list(l.lengths),
        "topology": qm.classify_topology(l).value,
        "connected": qm.is_connected(l),
        "surjective": qm.is_surjective(l),
        "radius": l.radius,
        "tauStar": qm.tau_star(l),
        "fullCircle": arc.is_full,
        "rImage": _arc_record(arc),
        "crImage": _arc_record(qm.cr_image(l)),
        "components": len(comps),
        "degree": {"perComponent": per, "total": total},
        "folds": folds,
        "cyclicConfigurations": cyclic,
    }
    rows = []
    for comp in comps:
        r = comp.r_values(l)
        for k, (al, ga, rv) in enumerate(zip(comp.alpha, comp.gamma, r)):
            V = qm.embed_config(l, float(al), float(ga))
            rows.append((comp.index, k, al, ga, rv.real, rv.imag, 1 - rv.real, -rv.imag, signed_area(V)))
    csv = dumps_csv(
        ("component", "index", "alpha", "gamma", "r_re", "r_im", "cr_re", "cr_im", "signed_area"),
        rows,
        "traced moduli space with uniformizer and cross-ratio values; angles in radians", precision=precision)
    svg = _quad_figure(l, [(c.alpha, c.gamma) for c in comps], arc, folds, title)
    return Bundle(record, "samples.csv", "figure.svg", {"samples.csv": csv, "figure.svg": svg})


def quad_critical_bundle(l: qm.QuadLinkage, samples: int, precision: int = DEFAULT_PRECISION) -> Bundle:
    qm._require_nondegenerate(l)
    folds = _fold_records(l)
    record = {
        "command": "quad critical",
        "lengths": list(l.lengths),
        "connected": qm.is_connected(l),
        "foldCount": len(folds),
        "tauStar": qm.tau_star(l),
        "folds": folds,
    }
    rows = [
        (k, f["alpha"], f["gamma"], f["criticalValue"], f["secondDeriv"], f["signedArea"]) for k, f in enumerate(folds)
    ]
    csv = dumps_csv(
        ("index", "alpha", "gamma", "critical_value", "second_deriv", "signed_area"),
        rows,
        "fold points of arg R; angles in radians", precision=precision)
    comps = qm.trace_moduli(l, samples)
    svg = _quad_figure(l, [(c.alpha, c.gamma) for c in comps], qm.r_image(l), folds, "folds")
    return Bundle(record, "folds.csv", "figure.svg", {"folds.csv": csv, "figure.svg": svg})


# --------------------------------------------------------------------------
# arm


def _arm_title(l: am.ArmLinkage) -> str:
    return f"A({', '.join(f'{x:g}' for x in l.lengths)})"


def _slice_record(s: am.TSlice) -> dict:
    rec = {"t": s.t, "kind": s.kind, "components": s.components}
    if s.arc is not None:
        rec.update(radius=s.arc.radius, argLo=s.arc.arg_lo, argHi=s.arc.arg_hi)
    if s.points:
        rec["points"] = list(s.points)
    return rec


def _slice_curve(s: am.TSlice, m: int = 181) -> np.ndarray:
    if s.arc is not None:
        return s.arc.sample(m)
    return np.array(s.points, dtype=complex)


def _morse_record(l: am.ArmLinkage) -> list[dict]:
    return [{"t": m.t, "phi": m.point.phi, "eta": m.point.eta, "index": m.index, "kind": m.kind} for m in am.morse_points(l)]


def _frame_svg(l: am.ArmLinkage, s: am.TSlice, history: list[am.TSlice]) -> str:
    size, pad = 300.0, 40.0
    p = Panel.square(pad, pad, size, 0j, 1.1 * l.image_bound, f"t = {s.t:.4g} ({s.kind})")
    p.axes()
    for h in history:
        p.curve(_slice_curve(h), stroke="#ccc", width=0.8)
    if s.arc is not None:
        p.curve(_slice_curve(s), stroke="#1f5fbf", width=2.0)
    for z in s.points:
        p.dot(z)
    return render_svg([p], 2 * pad + size, 2 * pad + size, _arm_title(l))


def arm_movie_bundle(l: am.ArmLinkage, frames: int, grid: int, precision: int = DEFAULT_PRECISION) -> Bundle:
    ann = am.annulus_image(l, frames, grid)
    record = {
        "command": "arm movie",
        "lengths": list(l.lengths),
        "caseTag": l.case_tag.value,
        "morseTValues": ann.morse_t_values,
        "morsePoints": _morse_record(l),
        "intervals": [{"tLo": x, "tHi": y, "components": k} for x, y, k in ann.interval_components],
        "imageBound": l.image_bound,
        "frames": [_slice_record(s) for s in ann.frames],
    }
    rows = [
        (k, s.t, s.kind, s.components, s.arc.radius if s.arc else 0.0, s.arc.arg_lo if s.arc else 0.0, s.arc.arg_hi if s.arc else 0.0)
        for k, s in enumerate(ann.frames)
    ]
    csv = dumps_csv(
        ("frame", "t", "kind", "components", "radius", "arg_lo", "arg_hi"),
        rows,
        "t-slices of the arm image in the chart at infinity; arguments in radians", precision=precision)
    files = {"frames.csv": csv}
    # contact sheet of all frames
    cols = 6
    size, pad = 150.0, 30.0
    panels = []
    for k, s in enumerate(ann.frames):
        r, c = divmod(k, cols)
        p = Panel.square(pad + c * (size + pad), 2 * pad + r * (size + pad), size, 0j, 1.1 * l.image_bound, f"t={s.t:.3g}")
        p.axes()
        if s.arc is not None:
            p.curve(_slice_curve(s), stroke="#1f5fbf", width=1.5)
        for z in s.points:
            p.dot(z, r=2.0)
        panels.append(p)
    rows_n = (len(ann.frames) + cols - 1) // cols
    files["movie.svg"] = render_svg(panels, pad + cols * (size + pad), 2 * pad + rows_n * (size + pad), _arm_title(l) + " t-slices")
    for k, s in enumerate(ann.frames):
        z = _slice_curve(s)
        files[f"frames/frame_{k:03d}.csv"] = dumps_csv(
            ("index", "w_re", "w_im"), [(i, v.real, v.imag) for i, v in enumerate(z)], f"slice t={s.t:.12g}", precision=precision)
        files[f"frames/frame_{k:03d}.svg"] = _frame_svg(l, s, ann.frames[:k])
    return Bundle(record, "frames.csv", "movie.svg", files)


def _audit(l: am.ArmLinkage, count: int = 24, seed: int = 0) -> list[dict]:
    rng = np.random.default_rng(seed)
    out = []
    a, b, c = l.lengths
    while len(out) < count:
        phi, eta = rng.uniform(0, TWO_PI, 2)
        if abs(am.jacobian_values(l, phi, eta)) < 0.05 * (a * b + a * c + b * c):
            continue
        w = complex(am.r_inverse_values(l, phi, eta))
        try:
            n = am.preimage_count(l, w)
            status = "regular"
        except am.IndeterminateValue:
            n, status = -1, "indeterminate"
        out.append({"w": w, "count": n, "signed": am.signed_preimage_count(l, w), "status": status})
    for k in range(4):
        w = 1.05 * l.image_bound * complex(math.cos(k * 1.3 + 0.2), math.sin(k * 1.3 + 0.2))
        out.append({"w": w, "count": am.preimage_count(l, w), "signed": 0, "status": "exterior"})
    return out


def arm_critical_bundle(l: am.ArmLinkage, grid: int, precision: int = DEFAULT_PRECISION) -> Bundle:
    curves = am.critical_set(l, grid)
    images = [am.r_inverse_values(l, c.phi, c.eta) for c in curves]
    corners = []
    for p in am.ALIGNED_POINTS:
        dist = min(
            float(np.min(np.hypot(*(((np.column_stack([c.phi, c.eta]) - [p.phi, p.eta]) + math.pi) % TWO_PI - math.pi).T)))
            for c in curves
        )
        jet = am.jet2_at_aligned(l, p)
        corners.append({"phi": p.phi, "eta": p.eta, "distanceToContour": dist, "jetVerdict": jet.verdict, "transverseSecond": jet.transverse_second})
    transv = min(float(np.min(am.fold_transversality(l, c.phi, c.eta))) for c in curves)
    record = {
        "command": "arm critical",
        "lengths": list(l.lengths),
        "caseTag": l.case_tag.value,
        "grid": grid,
        "foldCurves": [
            {
                "points": len(c),
                "tMin": float(np.min(am.end_distance(l, c.phi, c.eta))),
                "tMax": float(np.max(am.end_distance(l, c.phi, c.eta))),
                "imageRadiusMin": float(np.min(np.abs(z))),
                "imageRadiusMax": float(np.max(np.abs(z))),
            }
            for c, z in zip(curves, images)
        ],
        "alignedCorners": corners,
        "minFoldTransversality": transv,
        "audit": _audit(l),
    }
    rows = []
    for k, (c, z) in enumerate(zip(curves, images)):
        j = am.jacobian_values(l, c.phi, c.eta)
        for i in range(len(c)):
            rows.append((k, i, c.phi[i], c.eta[i], j[i], z[i].real, z[i].imag))
    csv = dumps_csv(
        ("curve", "index", "phi", "eta", "jacobian", "w_re", "w_im"),
        rows,
        "fold curves on the torus and their images in the chart at infinity; angles in radians", precision=precision)
    size, pad = 300.0, 40.0
    tp = torus_panel(pad, pad, size, "fold curves and t-levels (phi, eta)")
    tg = torus_grid(160)
    TP, TE = np.meshgrid(tg, tg, indexing="ij")
    tvals = am.end_distance(l, TP, TE) ** 2
    for t in np.linspace(l.t_min, l.t_max, 14)[1:-1]:
        for idx in zero_contours(tvals - t * t):
            tp.polyline(index_to_angle(idx[:, 0], 160), index_to_angle(idx[:, 1], 160), stroke="#bbb", width=0.6, closed=True, break_jumps=math.pi)
    for c in curves:
        tp.polyline(c.phi, c.eta, stroke="#bf3f1f", width=1.6, closed=True, break_jumps=math.pi)
    for p in am.ALIGNED_POINTS:
        tp.dot(complex(p.phi, p.eta), r=2.5, fill="#000")
    ip = Panel.square(2 * pad + size, pad, size, 0j, 1.1 * l.image_bound, "fold image (chart at infinity)")
    ip.axes()
    for z in images:
        ip.curve(z, stroke="#bf3f1f", width=1.6, closed=True)
    svg = render_svg([tp, ip], 3 * pad + 2 * size, 2 * pad + size, _arm_title(l))
    return Bundle(record, "folds.csv", "figure.svg", {"folds.csv": csv, "figure.svg": svg})


def arm_image_bundle(l: am.ArmLinkage, frames: int, grid: int, precision: int = DEFAULT_PRECISION) -> Bundle:
    ann = am.annulus_image(l, frames, grid)
    record = {
        "command": "arm image",
        "lengths": list(l.lengths),
        "caseTag": l.case_tag.value,
        "imageBound": l.image_bound,
        "outerRadius": [float(np.min(np.abs(ann.outer_boundary))), float(np.max(np.abs(ann.outer_boundary)))],
        "innerRadius": [float(np.min(np.abs(ann.inner_boundary))), float(np.max(np.abs(ann.inner_boundary)))],
        "innerEnclosesOrigin": ann.inner_encloses_origin,
        "morseTValues": ann.morse_t_values,
    }
    rows = []
    for name, z in (("outer", ann.outer_boundary), ("inner", ann.inner_boundary)):
        for i, v in enumerate(z):
            rows.append((name, i, v.real, v.imag))
    csv = dumps_csv(("boundary", "index", "w_re", "w_im"), rows, "annulus boundaries (fold images) in the chart at infinity", precision=precision)
    size, pad = 360.0, 40.0
    p = Panel.square(pad, pad, size, 0j, 1.1 * l.image_bound, "image of 1/R")
    p.axes()
    for s in ann.frames:
        p.curve(_slice_curve(s), stroke="#9bb7e0", width=0.8)
    p.curve(ann.outer_boundary, stroke="#bf3f1f", width=1.8, closed=True)
    if len(ann.inner_boundary):
        p.curve(ann.inner_boundary, stroke="#bf3f1f", width=1.8, closed=True)
    svg = render_svg([p], 2 * pad + size, 2 * pad + size, _arm_title(l))
    return Bundle(record, "boundaries.csv", "figure.svg", {"boundaries.csv": csv, "figure.svg": svg})


# --------------------------------------------------------------------------
# click plumbing


def _emit(bundle: Bundle, fmt: str, out: str | None, out_dir: str | None, precision: int, inputs: dict, started: float):
    files = dict(bundle.files)
    files["record.json"] = dumps_json(bundle.record, precision)
    primary = {"json": "record.json", "csv": bundle.csv_name, "svg": bundle.svg_name}[fmt]
    text = files[primary]
    if out and out != "-":
        Path(out).parent.mkdir(parents=True, exist_ok=True)
        Path(out).write_text(text, encoding="utf-8")
    elif not out_dir:
        click.echo(text, nl=False)
    if out_dir:
        root = Path(out_dir)
        manifest = []
        for name in sorted(files):
            path = root / name
            path.parent.mkdir(parents=True, exist_ok=True)
            path.write_text(files[name], encoding="utf-8")
            manifest.append({"path": name, "bytes": path.stat().st_size})
        report = {
            "tool": "quadlink",
            "version": __version__,
            "inputs": inputs,
            "results": bundle.record,
            "manifest": manifest,
            "durationSeconds": time.perf_counter() - started,
        }
        (root / "report.json").write_text(dumps_json(report, precision), encoding="utf-8")
        if out is None:
            click.echo(files["record.json"], nl=False)


def output_options(f: Callable) -> Callable:
    f = click.option("--precision", type=int, default=DEFAULT_PRECISION, show_default=True, help="Significant digits in JSON/CSV (3-17).")(f)
    f = click.option("--out-dir", type=click.Path(file_okay=False), default=None, help="Write every artifact plus report.json here.")(f)
    f = click.option("--out", type=click.Path(dir_okay=False, allow_dash=True), default=None, help="Destination of the selected format (default stdout).")(f)
    f = click.option("--format", "fmt", type=click.Choice(["json", "csv", "svg"]), default="json", show_default=True)(f)
    return f


def _run(make: Callable[[], Bundle], fmt, out, out_dir, precision, inputs):
    started = time.perf_counter()
    try:
        check_precision(precision)
        bundle = make()
    except (am.NonGenericArmError, qm.DegenerateLinkageError) as exc:
        raise CliError(str(exc), EXIT_NONGENERIC) from None
    except (qm.LinkageError, ValueError) as exc:
        raise CliError(str(exc), EXIT_INVALID) from None
    _emit(bundle, fmt, out, out_dir, precision, inputs, started)


def _parse_quad(text: str) -> qm.QuadLinkage:
    try:
        return qm.QuadLinkage.parse(text)
    except qm.LinkageError as exc:
        raise CliError(str(exc), EXIT_INVALID) from None


def _parse_arm(text: str) -> am.ArmLinkage:
    try:
        l = am.ArmLinkage.parse(text)
    except qm.LinkageError as exc:
        raise CliError(str(exc), EXIT_INVALID) from None
    try:
        am.check_generic(l)
    except am.NonGenericArmError as exc:
        raise CliError(str(exc), EXIT_NONGENERIC) from None
    return l


@click.group()
@click.version_option(__version__, prog_name="linkage")
def main():
    """Cross-ratio maps of quadrilateral linkages and planar robot 3-arms."""


@main.group()
def quad():
    """Closed 4-bar linkages Q(a, b, c, d)."""


@main.group()
def arm():
    """Planar robot 3-arms A(a, b, c)."""


@quad.command("classify")
@click.option("--lengths", required=True, help="a,b,c,d")
@output_options
def quad_classify(lengths, fmt, out, out_dir, precision):
    """Moduli-space topology, connectedness and surjectivity."""
    l = _parse_quad(lengths)

    def make():
        rec = quad_classify_record(l)
        csv = dumps_csv(("key", "value"), [(k, v) for k, v in rec.items() if not isinstance(v, (dict, list))], "classification", precision)
        return Bundle(rec, "classify.csv", "classify.csv", {"classify.csv": csv})

    if fmt == "svg":
        raise CliError("quad classify has no SVG output", EXIT_INVALID)
    _run(make, fmt, out, out_dir, precision, {"lengths": lengths})


@quad.command("image")
@click.option("--lengths", required=True, help="a,b,c,d")
@click.option("--samples", type=click.IntRange(min=16), default=1024, show_default=True)
@output_options
def quad_image(lengths, samples, fmt, out, out_dir, precision):
    """Image arcs of R and Cr with the traced moduli space."""
    l = _parse_quad(lengths)
    _run(lambda: quad_image_bundle(l, samples, precision), fmt, out, out_dir, precision, {"lengths": lengths, "samples": samples})


@quad.command("critical")
@click.option("--lengths", required=True, help="a,b,c,d")
@click.option("--samples", type=click.IntRange(min=16), default=1024, show_default=True)
@output_options
def quad_critical(lengths, samples, fmt, out, out_dir, precision):
    """Fold points of the cross-ratio map with their certificates."""
    l = _parse_quad(lengths)
    _run(lambda: quad_critical_bundle(l, samples, precision), fmt, out, out_dir, precision, {"lengths": lengths, "samples": samples})


@arm.command("movie")
@click.option("--lengths", required=True, help="a,b,c")
@click.option("--frames", type=click.IntRange(min=1), default=24, show_default=True)
@click.option("--grid", type=click.IntRange(min=16), default=512, show_default=True)
@output_options
def arm_movie(lengths, frames, grid, fmt, out, out_dir, precision):
    """t-slices of the image with Morse data."""
    l = _parse_arm(lengths)
    _run(lambda: arm_movie_bundle(l, frames, grid, precision), fmt, out, out_dir, precision, {"lengths": lengths, "frames": frames, "grid": grid})


@arm.command("critical")
@click.option("--lengths", required=True, help="a,b,c")
@click.option("--grid", type=click.IntRange(min=16), default=512, show_default=True)
@output_options
def arm_critical(lengths, grid, fmt, out, out_dir, precision):
    """Fold curves, their images and a preimage-count audit."""
    l = _parse_arm(lengths)
    _run(lambda: arm_critical_bundle(l, grid, precision), fmt, out, out_dir, precision, {"lengths": lengths, "grid": grid})


@arm.command("image")
@click.option("--lengths", required=True, help="a,b,c")
@click.option("--frames", type=click.IntRange(min=1), default=24, show_default=True)
@click.option("--grid", type=click.IntRange(min=16), default=512, show_default=True)
@output_options
def arm_image(lengths, frames, grid, fmt, out, out_dir, precision):
    """Annulus image of 1/R with its fold boundaries."""
    l = _parse_arm(lengths)
    _run(lambda: arm_image_bundle(l, frames, grid, precision), fmt, out, out_dir, precision, {"lengths": lengths, "frames": frames, "grid": grid})


if __name__ == "__main__":
    sys.exit(main())
