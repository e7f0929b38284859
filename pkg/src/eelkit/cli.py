"""``eelkit`` command line: construct, check, bound, certify, export.

Exit codes: 0 pass, 1 property violation, 2 usage or input error.
"""

from __future__ import annotations

import json
import math
import re
import sys
from pathlib import Path

import click
import numpy as np

from . import checks as _checks
from .config import (
    DEFAULT_MAX_SAMPLES,
    DEFAULT_STEP,
    DEFAULT_TOL,
    DegenerateSampleError,
    DomainError,
    PreconditionError,
    threads_from_env,
)
from .constructions import (
    LEMMAS,
    EelParams,
    SampleBudgetError,
    certify_lemma,
    example_curve_3d,
    gradient_descent_trajectory,
    helix,
    plan_cylinder_eel,
    plan_infinite_eel,
)
from .curve import CurveFormatError, SampledCurve, read_csv, write_csv
from .geometry import build_sphere_net
from .rectifiability import length_bound, repulsion_constants, verify_length_bound, width_profile, widths_to_csv

EXIT_PASS, EXIT_FAIL, EXIT_USAGE = 0, 1, 2

_SQRT_TOKEN = re.compile(r"^\s*(-?)\s*1\s*/\s*sqrt\s*\(?\s*(\d+(?:\.\d*)?)\s*\)?\s*$")


class LambdaType(click.ParamType):
    """A float literal or ``1/sqrtK`` (e.g. ``1/sqrt5``, ``1/sqrt(5)``)."""

    name = "lambda"

    def convert(self, value, param, ctx):
        if isinstance(value, float):
            return value
        m = _SQRT_TOKEN.match(str(value))
        if m:
            x = 1.0 / math.sqrt(float(m.group(2)))
            return -x if m.group(1) else x
        try:
            return float(value)
        except ValueError:
            self.fail(f"{value!r} is neither a number nor a 1/sqrtK token", param, ctx)


class MuType(click.ParamType):
    name = "mu"

    def convert(self, value, param, ctx):
        if value is None or (isinstance(value, str) and value.lower() == "auto"):
            return None
        try:
            return float(value)
        except ValueError:
            self.fail(f"{value!r} is neither a number nor 'auto'", param, ctx)


class GridType(click.ParamType):
    """Integer grid resolution; accepts ``1e4``."""

    name = "grid"

    def convert(self, value, param, ctx):
        try:
            g = float(value)
        except ValueError:
            self.fail(f"{value!r} is not a number", param, ctx)
        if g != int(g) or g < 2:
            self.fail(f"grid must be an integer >= 2, got {value}", param, ctx)
        return int(g)


LAMBDA = LambdaType()
MU = MuType()
GRID = GridType()


def _fail(message: str, code: int = EXIT_USAGE):
    click.echo(f"error: {message}", err=True)
    sys.exit(code)


def _threads(flag: int) -> int:
    try:
        return threads_from_env(flag)
    except (DomainError, ValueError) as exc:
        _fail(str(exc))


def _dump(obj) -> str:
    return json.dumps(obj, indent=2, allow_nan=True)


def _emit(obj, path: Path | None) -> None:
    text = _dump(obj) + "\n"
    if path is None:
        click.echo(text, nl=False)
    else:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)


def _load(path: str) -> SampledCurve:
    try:
        return read_csv(path)
    except CurveFormatError as exc:
        _fail(f"{path}: {exc}")
    except OSError as exc:
        _fail(str(exc))


def _params(mu) -> EelParams:
    try:
        return EelParams.derive(mu).validate()
    except DomainError as exc:
        _fail(str(exc))


@click.group(context_settings={"help_option_names": ["-h", "--help"]})
@click.version_option(package_name="eelkit")
def main():
    """Construct, check and certify self-expanded curves and lambda-eels."""


# ---------------------------------------------------------------------------
# construct


def _jsonable(x):
    if isinstance(x, dict):
        return {k: _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, np.generic):
        return x.item()
    if isinstance(x, int) and abs(x) > 2**53:
        return str(x)
    return x


def _write_curve(curve: SampledCurve, out_dir: Path, name: str, extra: dict | None = None) -> None:
    out_dir.mkdir(parents=True, exist_ok=True)
    write_csv(curve, out_dir / f"{name}.csv")
    meta = {**curve.meta, **(extra or {}), "samples": len(curve)}
    _emit(_jsonable(meta), out_dir / f"{name}.meta.json")
    click.echo(f"wrote {out_dir / name}.csv ({len(curve)} samples)")


def _sample_plan(plan, out_dir: Path, name: str, plan_only: bool, max_samples: int, threads: int) -> None:
    summary = _jsonable({"params": plan.params.to_dict(), **plan.summary()})
    if plan_only:
        out_dir.mkdir(parents=True, exist_ok=True)
        _emit(summary, out_dir / f"{name}.meta.json")
        click.echo(_dump(summary))
        return
    try:
        curve = plan.sample(max_samples, workers=threads)
    except SampleBudgetError as exc:
        out_dir.mkdir(parents=True, exist_ok=True)
        _emit(summary, out_dir / f"{name}.meta.json")
        _fail(f"{exc}; plan written to {out_dir / name}.meta.json")
    _write_curve(curve, out_dir, name, {"length": plan.length, "max_norm": plan.max_norm()})


def _common(f):
    f = click.option("--out-dir", "-o", type=click.Path(file_okay=False, path_type=Path), default=Path("."),
                     show_default=True, help="Directory for <name>.csv and <name>.meta.json.")(f)
    f = click.option("--name", default=None, help="Output base name.")(f)
    f = click.option("--step", type=float, default=DEFAULT_STEP, show_default=True, help="Sampling step.")(f)
    return f


def _eel_options(f):
    f = click.option("--plan-only", is_flag=True, help="Write the exact plan without sampling.")(f)
    f = click.option("--max-samples", type=int, default=DEFAULT_MAX_SAMPLES, show_default=True)(f)
    f = click.option("--threads", type=int, default=1, show_default=True)(f)
    return f


@main.group()
def construct():
    """Emit a constructed curve as CSV plus JSON metadata."""


@construct.command("helix")
@click.option("--r", "r", type=float, default=1.0, show_default=True)
@click.option("--mu", type=MU, default="auto", show_default=True)
@click.option("--turns", type=float, default=None, help="Revolutions starting at t = 0.")
@click.option("--t-lo", type=float, default=0.0, show_default=True)
@click.option("--t-hi", type=float, default=None)
@_common
def construct_helix(r, mu, turns, t_lo, t_hi, out_dir, name, step):
    """Spiral (r cos t, r sin t, mu r t)."""
    if t_hi is None:
        t_hi = t_lo + 2.0 * math.pi * (1.0 if turns is None else turns)
    try:
        c = helix(r, mu, t_lo, t_hi, step)
    except DomainError as exc:
        _fail(str(exc))
    _write_curve(c, out_dir, name or "helix")


@construct.command("cylinder-eel")
@click.option("--r", "r", type=float, default=1.0, show_default=True)
@click.option("--a", "a", type=float, default=0.0, show_default=True)
@click.option("--n", "n", type=int, default=3, show_default=True, help="Odd number of nested spirals.")
@click.option("--mu", type=MU, default="auto", show_default=True)
@_eel_options
@_common
def construct_cylinder_eel(r, a, n, mu, plan_only, max_samples, threads, out_dir, name, step):
    """Eel of length > 1 inside a short cylinder."""
    try:
        plan = plan_cylinder_eel(r, a, n, _params(mu), step)
    except (DomainError, PreconditionError) as exc:
        _fail(str(exc))
    _sample_plan(plan, out_dir, name or "cylinder_eel", plan_only, max_samples, _threads(threads))


@construct.command("infinite-eel")
@click.option("--stages", type=int, default=1, show_default=True)
@click.option("--mu", type=MU, default="auto", show_default=True)
@_eel_options
@_common
def construct_infinite_eel(stages, mu, plan_only, max_samples, threads, out_dir, name, step):
    """First stages of the bounded eel of infinite length."""
    try:
        plan = plan_infinite_eel(stages, _params(mu), step)
    except DomainError as exc:
        _fail(str(exc))
    _sample_plan(plan, out_dir, name or "infinite_eel", plan_only, max_samples, _threads(threads))


@construct.command("example3d")
@_common
def construct_example3d(out_dir, name, step):
    """Five-branch C^1 curve with the lambda0-cone property that is no lambda-curve."""
    try:
        c = example_curve_3d(step)
    except DomainError as exc:
        _fail(str(exc))
    _write_curve(c, out_dir, name or "example3d")


def _matrix(text: str) -> np.ndarray:
    try:
        return np.array([[float(x) for x in row.split(",")] for row in text.split(";")])
    except ValueError:
        _fail(f"cannot parse matrix {text!r}; use rows separated by ';' and entries by ','")


@construct.command("gradient-descent")
@click.option("--q", "q", default="1,0;0,10", show_default=True, help="SPD matrix, rows separated by ';'.")
@click.option("--x0", default="1,1", show_default=True)
@click.option("--step-size", type=float, default=0.01, show_default=True)
@click.option("--iters", type=int, default=200, show_default=True)
@click.option("--out-dir", "-o", type=click.Path(file_okay=False, path_type=Path), default=Path("."))
@click.option("--name", default=None)
def construct_gradient_descent(q, x0, step_size, iters, out_dir, name):
    """Gradient descent iterates on x -> <Qx, x>."""
    Q = _matrix(q)
    x = _matrix(x0).reshape(-1)
    try:
        c = gradient_descent_trajectory(Q, x, step_size, iters)
    except DomainError as exc:
        _fail(str(exc))
    _write_curve(c, out_dir, name or "gd_traj")


# ---------------------------------------------------------------------------
# check, bound, certify, export


@main.command()
@click.argument("prop", metavar="PROPERTY",
                type=click.Choice([p.replace("_", "-") for p in _checks.PROPERTIES] + list(_checks.PROPERTIES)))
@click.argument("path", type=click.Path(dir_okay=False))
@click.option("--lambda", "lam", type=LAMBDA, default="0", show_default=True, help="Literal or 1/sqrt5.")
@click.option("--tol", type=float, default=DEFAULT_TOL, show_default=True)
@click.option("--steps", type=int, default=1, show_default=True, help="Secant averaging (lambda-cone).")
@click.option("--secant", type=click.Choice(_checks.SECANTS), default="forward", show_default=True,
              help="Chord attached to each sample (lambda-cone, conical-split).")
@click.option("--start-index", type=int, default=0, show_default=True, help="Anchor (lyapunov).")
@click.option("--threads", type=int, default=1, show_default=True)
@click.option("--report", type=click.Path(dir_okay=False, path_type=Path), default=None,
              help="Write the JSON report here instead of stdout.")
def check(prop, path, lam, tol, steps, secant, start_index, threads, report):
    """Check PROPERTY on the polyline CSV at PATH."""
    prop = prop.replace("-", "_")
    c = _load(path)
    workers = _threads(threads)
    kwargs = {}
    if prop == "lambda_cone":
        kwargs = {"secant_steps": steps, "workers": workers, "secant": secant}
    elif prop == "conical_split":
        kwargs = {"workers": workers, "secant": secant}
    elif prop in ("lambda_curve", "noncollinear"):
        kwargs = {"workers": workers}
    elif prop == "lyapunov":
        kwargs = {"start_index": start_index}
    if not tol > 0:
        _fail(f"tol must be positive, got {tol}")
    try:
        rep = _checks.run_check(c, prop, lam, tol, **kwargs)
    except (DomainError, DegenerateSampleError) as exc:
        _fail(str(exc))
    _emit(rep.to_dict(), report)
    if not rep.passed:
        click.echo(f"FAIL {prop}: worst margin {rep.worst_margin:.6g} at samples {list(rep.witness)}", err=True)
    sys.exit(EXIT_PASS if rep.passed else EXIT_FAIL)


@main.command()
@click.argument("path", required=False, type=click.Path(dir_okay=False))
@click.option("--lambda", "lam", type=LAMBDA, required=True)
@click.option("--d", "d", type=int, default=None, help="Dimension (defaults to the curve's).")
@click.option("--diam", type=float, default=None, help="Diameter, when no curve is given.")
@click.option("--no-precheck", is_flag=True, help="Skip the lambda-curve precondition check.")
@click.option("--threads", type=int, default=1, show_default=True)
def bound(path, lam, d, diam, no_precheck, threads):
    """Universal length bound, against the curve at PATH if given."""
    if path is None and (diam is None or d is None):
        _fail("give a curve file, or both --d and --diam")
    c = _load(path) if path is not None else None
    d = d if d is not None else c.dim
    try:
        repulsion_constants(lam, d)
    except DomainError as exc:
        _fail(f"{exc} (the length bound only holds for lambda-curves with lambda < 1/d)")
    if c is None:
        k = repulsion_constants(lam, d)
        b = length_bound(lam, d, diam)
        _emit({"lambda": lam, "d": d, "diameter": diam, "eta": k.eta,
               "net_size": len(build_sphere_net(d, k.eta)), "bound": b}, None)
        sys.exit(EXIT_PASS)
    try:
        rep = verify_length_bound(c, lam, d, workers=_threads(threads), precheck=not no_precheck)
    except PreconditionError as exc:
        click.echo(f"refused: {exc}", err=True)
        _emit({"refused": str(exc), "check": exc.diagnostic.to_dict()}, None)
        sys.exit(EXIT_FAIL)
    except (DomainError, DegenerateSampleError) as exc:
        _fail(str(exc))
    _emit(rep.to_dict(), None)
    sys.exit(EXIT_PASS if rep.passed else EXIT_FAIL)


@main.command()
@click.argument("lemma", type=click.Choice(LEMMAS))
@click.option("--mu", type=MU, default="auto", show_default=True)
@click.option("--N", "N", type=int, default=None, help="Override the derived N.")
@click.option("--M", "M", type=float, default=None, help="Override the derived M.")
@click.option("--grid", type=GRID, default="1e4", show_default=True, help="Points per axis.")
@click.option("--threads", type=int, default=1, show_default=True)
@click.option("--report", type=click.Path(dir_okay=False, path_type=Path), default=None)
def certify(lemma, mu, N, M, grid, threads, report):
    """Evaluate LEMMA's inequality on a grid; exit 0 iff the max violation is <= 0."""
    try:
        base = EelParams.derive(mu)
    except DomainError as exc:
        _fail(str(exc))
    params = EelParams(base.mu, N if N is not None else base.N, M if M is not None else base.M, base.lam)
    try:
        rec = certify_lemma(lemma, params, grid, workers=_threads(threads))
    except DomainError as exc:
        _fail(str(exc))
    _emit(rec.to_dict(), report)
    sys.exit(EXIT_PASS if rec.certified else EXIT_FAIL)


@main.group()
def export():
    """Export derived artifacts."""


@export.command("widths")
@click.argument("path", type=click.Path(dir_okay=False))
@click.option("--lambda", "lam", type=LAMBDA, required=True)
@click.option("--output", "-o", type=click.Path(dir_okay=False, path_type=Path), default=None)
def export_widths(path, lam, output):
    """Width profile CSV (t, W_1..W_N, W_F) of the curve at PATH."""
    c = _load(path)
    try:
        k = repulsion_constants(lam, c.dim)
    except DomainError as exc:
        _fail(str(exc))
    text = widths_to_csv(width_profile(c, build_sphere_net(c.dim, k.eta)))
    if output is None:
        click.echo(text, nl=False)
    else:
        with open(output, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)


@export.command("params")
@click.option("--mu", type=MU, default="auto", show_default=True)
@click.option("--output", "-o", type=click.Path(dir_okay=False, path_type=Path), default=None)
def export_params(mu, output):
    """Constant bundle (mu, N, M, lambda, alpha) as JSON."""
    _emit(_params(mu).to_dict(), output)


if __name__ == "__main__":  # pragma: no cover
    main()
