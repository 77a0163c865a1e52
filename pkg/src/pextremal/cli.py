"""Command-line surface: reproducible experiment runners.

Every command writes exactly one JSON run manifest next to its outputs;
re-running with identical parameters and seed reproduces bit-identical
CSV payloads.  Exit codes: 0 success, 2 argument/parse error,
3 solver non-convergence, 4 I/O failure, 5 resource cap exceeded.
"""
from __future__ import annotations

import csv
import json
import math
import os
import sys
import time
from pathlib import Path

import click


def _parse_q(text: str) -> float:
    text = text.strip().lower()
    if text in ("inf", "infinity", "oo"):
        return math.inf
    try:
        q = float(text)
    except ValueError:
        raise click.BadParameter(f"cannot parse q value {text!r}")
    if q < 1:
        raise click.BadParameter("q must be >= 1")
    return q


def _parse_complex(text: str) -> complex:
    cleaned = text.strip().replace(" ", "").replace("i", "j").replace("I", "j")
    try:
        return complex(cleaned)
    except ValueError:
        raise click.BadParameter(f"cannot parse complex literal {text!r}")


def _parse_point(text: str):
    return tuple(_parse_complex(part) for part in text.split(","))


def _parse_list(text: str, cast):
    return [cast(part.strip()) for part in text.split(",") if part.strip()]


def _write_csv(path: Path, header, rows):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([_fmt(v) for v in row])


def _fmt(v):
    if isinstance(v, float):
        return repr(v)
    return v


def _write_manifest(out_dir: Path, command: str, parameters: dict,
                    outputs, started: float, seed=None):
    from . import __version__

    manifest = {
        "schema_version": "1",
        "command": command,
        "parameters": parameters,
        "seed": seed,
        "tool_version": __version__,
        "wall_time_ms": int((time.monotonic() - started) * 1000),
        "outputs": [str(p) for p in outputs],
    }
    path = out_dir / f"{command}_manifest.json"
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return path


def _guard(fn):
    """Map library failures onto the stable exit-code contract."""
    import functools

    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        from .extremal import ConvergenceError
        from .fekete import ResourceCapError

        try:
            return fn(*args, **kwargs)
        except ResourceCapError as exc:
            click.echo(f"error: {exc}", err=True)
            sys.exit(5)
        except ConvergenceError as exc:
            click.echo(f"error: {exc}", err=True)
            sys.exit(3)
        except OSError as exc:
            click.echo(f"error: {exc}", err=True)
            sys.exit(4)
        except ValueError as exc:
            click.echo(f"error: {exc}", err=True)
            sys.exit(2)

    return wrapper


def _out_dir(path: str) -> Path:
    p = Path(path)
    p.mkdir(parents=True, exist_ok=True)
    return p


@click.group()
@click.version_option()
def main():
    """Extremal functions of the complex ball for lq-body degrees."""


@main.command("eval")
@click.option("--q", "q_text", required=True, help="body exponent: 1, 2, 4, inf, ...")
@click.option("--z", "z_text", required=True,
              help='point as comma-separated complex literals, e.g. "2+0i,0+0i"')
@click.option("--tol", default=1e-10, show_default=True)
@click.option("--out", default=".", show_default=True, help="manifest directory")
@_guard
def cmd_eval(q_text, z_text, tol, out):
    """Evaluate the ball extremal function at one point."""
    from .body import ConvexBody
    from .extremal import v_ball
    from .functional import ModuliPoint

    started = time.monotonic()
    q = _parse_q(q_text)
    z = _parse_point(z_text)
    body = ConvexBody(q, len(z))
    result = v_ball(body, ModuliPoint.from_point(z), tol=tol)
    payload = {
        "value": result.value,
        "theta_star": None if result.theta_star is None else list(result.theta_star),
        "kkt_residual": result.kkt_residual,
        "iterations": result.iterations,
        "method": result.method,
        "q": body.q_label,
    }
    click.echo(json.dumps(payload, sort_keys=True))
    _write_manifest(_out_dir(out), "eval",
                    {"q": body.q_label, "z": z_text, "tol": tol}, [], started)


@main.command("contour")
@click.option("--q-list", default="1,2,4", show_default=True)
@click.option("--levels", default="0.25,0.5,0.75,1,1.25", show_default=True,
              help="level metadata recorded for the plotting component")
@click.option("--grid", default=400, show_default=True)
@click.option("--rmax", default=3.0, show_default=True)
@click.option("--tol", default=1e-10, show_default=True)
@click.option("--out", required=True, help="output directory")
@_guard
def cmd_contour(q_list, levels, grid, rmax, tol, out):
    """Value grids of the extremal function over the moduli quarter-plane."""
    from .body import ConvexBody
    from .extremal import v_ball
    from .functional import ModuliPoint

    started = time.monotonic()
    if grid < 16:
        raise click.BadParameter("grid must be >= 16")
    if rmax <= 1:
        raise click.BadParameter("rmax must exceed 1")
    qs = [_parse_q(t) for t in q_list.split(",")]
    level_values = _parse_list(levels, float)
    out_dir = _out_dir(out)
    outputs = []
    import numpy as np

    radii = np.linspace(0.0, rmax, grid)
    for q in qs:
        body = ConvexBody(q, 2)
        rows = []
        for r1 in radii:
            for r2 in radii:
                v = v_ball(body, ModuliPoint((r1 * r1, r2 * r2)), tol=tol).value
                rows.append((float(r1), float(r2), float(v)))
        path = out_dir / f"contour_q{body.q_label}.csv"
        _write_csv(path, ["r1", "r2", "v"], rows)
        outputs.append(path)
    _write_manifest(out_dir, "contour",
                    {"q_list": q_list, "levels": level_values, "grid": grid,
                     "rmax": rmax, "tol": tol}, outputs, started)


@main.command("approx")
@click.option("--f", "f_name", type=click.Choice(["f1", "f2", "f3"]), required=True)
@click.option("--a", default=None, type=float, help="pole parameter, required for f2")
@click.option("--q-list", default="1,4", show_default=True)
@click.option("--nmax", default=40, show_default=True)
@click.option("--out", required=True)
@_guard
def cmd_approx(f_name, a, q_list, nmax, out):
    """Best-L2 error sweep (function, q, n, d_n, error) rows."""
    from . import approx
    from .body import ConvexBody

    started = time.monotonic()
    if f_name == "f2" and a is None:
        raise click.BadParameter("--a is required for f2")
    series = {"f1": approx.f1(), "f2": approx.f2(a) if a else None,
              "f3": approx.f3()}[f_name]
    qs = [_parse_q(t) for t in q_list.split(",")]
    out_dir = _out_dir(out)
    rows = []
    for q in qs:
        body = ConvexBody(q, 2)
        for n in range(1, nmax + 1):
            err = approx.l2_error(series, body, n)
            rows.append((f_name, body.q_label, n, len(body.index_set(n)), float(err)))
    path = out_dir / f"approx_{f_name}.csv"
    _write_csv(path, ["f", "q", "n", "d_n", "error"], rows)
    _write_manifest(out_dir, "approx",
                    {"f": f_name, "a": a, "q_list": q_list, "nmax": nmax},
                    [path], started)


@main.command("rate")
@click.option("--f", "f_name", type=click.Choice(["f1", "f2", "f3"]), required=True)
@click.option("--a", default=None, type=float)
@click.option("--q", "q_text", required=True)
@click.option("--out", default=".", show_default=True)
@_guard
def cmd_rate(f_name, a, q_text, out):
    """Predicted exponential approximation rate from the singular set."""
    from . import approx
    from .body import ConvexBody

    started = time.monotonic()
    q = _parse_q(q_text)
    if f_name == "f2" and a is None:
        raise click.BadParameter("--a is required for f2")
    series = {"f1": approx.f1(), "f2": approx.f2(a) if a else None,
              "f3": approx.f3()}[f_name]
    body = ConvexBody(q, 2)
    pred = approx.singular_rate(series, body)
    target = None
    if f_name == "f1":
        target = math.log(2.0)
    elif f_name == "f2":
        target = math.log(a)
    elif f_name == "f3":
        target = 2.0 ** (-1.0 / q) * math.log(2.0) if not math.isinf(q) else math.log(2.0)
    payload = {
        "log_R": pred.log_R,
        "witness_moduli_sq": list(pred.witness_point.moduli_sq),
        "q": body.q_label,
        "analytic_target": target,
    }
    click.echo(json.dumps(payload, sort_keys=True))
    _write_manifest(_out_dir(out), "rate",
                    {"f": f_name, "a": a, "q": body.q_label}, [], started)


@main.command("fekete")
@click.option("--q", "q_text", required=True)
@click.option("--n", required=True, type=int)
@click.option("--grid-s", default=16, show_default=True)
@click.option("--grid-phi", default=16, show_default=True)
@click.option("--sweeps", default=30, show_default=True)
@click.option("--seed", default=0, show_default=True)
@click.option("--out", required=True)
@_guard
def cmd_fekete(q_text, n, grid_s, grid_phi, sweeps, seed, out):
    """Coordinate-exchange search for near-Fekete arrays on the sphere."""
    from .body import ConvexBody
    from .fekete import FeketeConfig, search_fekete

    started = time.monotonic()
    body = ConvexBody(_parse_q(q_text), 2)
    cfg = FeketeConfig(P=body, n=n, grid_s=grid_s, grid_phi=grid_phi,
                       seed=seed, sweeps=sweeps)
    result = search_fekete(cfg)
    out_dir = _out_dir(out)
    csv_path = out_dir / f"fekete_q{body.q_label}_n{n}_seed{seed}.csv"
    rows = [(z1.real, z1.imag, z2.real, z2.imag, abs(z1)) for z1, z2 in result.points]
    _write_csv(csv_path, ["re_z1", "im_z1", "re_z2", "im_z2", "abs_z1"], rows)
    summary = {
        "n": result.n, "d_n": result.d_n, "l_n": result.l_n,
        "log_abs_vdm": result.log_abs_vdm,
        "delta_estimate": result.delta_estimate,
        "seed": result.seed,
        "converged": result.converged,
        "radial_fractions": [float(v) for v in result.radial_fractions],
    }
    json_path = out_dir / f"fekete_q{body.q_label}_n{n}_seed{seed}.json"
    with open(json_path, "w", encoding="utf-8") as fh:
        json.dump(summary, fh, indent=2, sort_keys=True)
        fh.write("\n")
    _write_manifest(out_dir, "fekete",
                    {"q": body.q_label, "n": n, "grid_s": grid_s,
                     "grid_phi": grid_phi, "sweeps": sweeps},
                    [csv_path, json_path], started, seed=seed)


@main.command("randfield")
@click.option("--q", "q_text", required=True)
@click.option("--n-list", default="20,40,80", show_default=True)
@click.option("--seeds", default="1,2,3,4,5", show_default=True)
@click.option("--grid-count", default=200, show_default=True)
@click.option("--grid-seed", default=12345, show_default=True)
@click.option("--out", required=True)
@_guard
def cmd_randfield(q_text, n_list, seeds, grid_count, grid_seed, out):
    """Potential-convergence deviations of Gaussian random polynomial pairs."""
    from .body import ConvexBody
    from .randfields import AnnulusGrid, l1_deviation

    started = time.monotonic()
    body = ConvexBody(_parse_q(q_text), 2)
    ns = _parse_list(n_list, int)
    seed_list = _parse_list(seeds, int)
    grid = AnnulusGrid(count=grid_count, seed=grid_seed)
    out_dir = _out_dir(out)
    rows = []
    for n in ns:
        per_seed = [l1_deviation(body, n, [s], grid) for s in seed_list]
        for s, dev in zip(seed_list, per_seed):
            rows.append((n, str(s), float(dev)))
        rows.append((n, "all", float(sum(per_seed) / len(per_seed))))
    path = out_dir / f"randfield_q{body.q_label}.csv"
    _write_csv(path, ["n", "seed", "mean_abs_dev"], rows)
    _write_manifest(out_dir, "randfield",
                    {"q": body.q_label, "n_list": n_list, "seeds": seeds,
                     "grid_count": grid_count, "grid_seed": grid_seed},
                    [path], started, seed=grid_seed)


if __name__ == "__main__":
    main()
