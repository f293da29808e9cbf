"""Command-line frontend.

Subcommands
-----------
``classify``       endpoint classification report (JSON)
``solve``          initial-value solution trace (CSV)
``greens``         Green's kernel samples on a grid (CSV)
``spectrum``       eigenvalues in a rectangle (JSON)
``weyl``           nested-disk trichotomy report (JSON)
``dissipativity``  dissipativity certificate (JSON)
``oracle``         finite-difference eigenvalues / numerical range (JSON)

Conventions
-----------
Numbers accept ``pi``/``inf``/``-inf`` words; complex values are written
``re,im`` (a bare real is accepted). Boundary conditions use the
shorthands ``d`` = Dirichlet ``(0, 1)``, ``n`` = Neumann ``(1, 0)``,
``r:re,im/re,im`` = general vector, ``max`` = no condition. ``--config``
names a JSON file whose keys fill in any option not given on the command
line. Output goes to stdout or ``--out``; identical inputs and seeds
produce byte-identical output.

Exit codes: 0 on success; 1 for usage errors (unknown options, malformed
values or config); 2 for domain errors (indeterminate classification,
failed searches, ill-posed realizations).
"""

import csv
import io
import json
import math
import sys

import click
import numpy as np

from .boundary import (BoundaryFunctional, BoundarySpec, classify,
                       dissipativity_certificate)
from .exceptions import (ArgumentError, ComplexSturmError,
                         ExpressionSyntaxError)
from .greens import KERNEL_KINDS, build_kernel, kernel_eval
from .ivp import solve_ivp, solve_semiregular
from .potential import parse_potential
from .spectra import (Realization, fd_numerical_range, fd_oracle_build,
                      find_eigenvalues, richardson_eigenvalues,
                      shooting_solutions)
from .weyl import trichotomy

_WORDS = {"pi": math.pi, "+pi": math.pi, "-pi": -math.pi,
          "inf": math.inf, "+inf": math.inf, "-inf": -math.inf}


def _num(tok, what="number"):
    if isinstance(tok, (int, float)):
        return float(tok)
    t = str(tok).strip().lower()
    if t in _WORDS:
        return _WORDS[t]
    try:
        return float(t)
    except ValueError:
        raise click.BadParameter("{0}: expected a {1} (floats and the "
                                 "words pi/inf/-inf)".format(tok, what))


def _cnum(tok, what="complex number"):
    """``re,im`` pair or bare real."""
    if isinstance(tok, (int, float)):
        return complex(tok)
    if isinstance(tok, (list, tuple)) and len(tok) == 2:
        return complex(_num(tok[0], what), _num(tok[1], what))
    parts = str(tok).split(",")
    if len(parts) == 1:
        return complex(_num(parts[0], what), 0.0)
    if len(parts) == 2:
        return complex(_num(parts[0], what), _num(parts[1], what))
    raise click.BadParameter("{0}: expected 're,im' or a bare real for "
                             "{1}".format(tok, what))


def _pair(tok, what):
    if isinstance(tok, (list, tuple)) and len(tok) == 2:
        return _num(tok[0], what), _num(tok[1], what)
    parts = str(tok).split(",")
    if len(parts) != 2:
        raise click.BadParameter("{0}: expected 'lo,hi' for {1}".format(
            tok, what))
    return _num(parts[0], what), _num(parts[1], what)


def _rect(tok):
    if isinstance(tok, (list, tuple)) and len(tok) == 4:
        vals = [_num(t, "region corner") for t in tok]
    else:
        parts = str(tok).split(",")
        if len(parts) != 4:
            raise click.BadParameter(
                "{0}: expected 're0,re1,im0,im1'".format(tok))
        vals = [_num(t, "region corner") for t in parts]
    if not (vals[1] > vals[0] and vals[3] > vals[2]):
        raise click.BadParameter("region rectangle is degenerate")
    return tuple(vals)


def _bc(tok, side):
    t = str(tok).strip()
    low = t.lower()
    if low == "max":
        return None
    if low == "d":
        return BoundaryFunctional.from_vector(side, 0.0, 1.0)
    if low == "n":
        return BoundaryFunctional.from_vector(side, 1.0, 0.0)
    if low.startswith("r:"):
        parts = t[2:].split("/")
        if len(parts) == 2:
            return BoundaryFunctional.from_vector(
                side, _cnum(parts[0], "alpha0"), _cnum(parts[1], "alpha1"))
    raise click.BadParameter(
        "{0}: boundary condition must be d, n, r:re,im/re,im or max"
        .format(tok))


def _potential(expr, interval):
    try:
        return parse_potential(str(expr), _pair(interval, "interval"))
    except ExpressionSyntaxError as err:
        raise click.BadParameter("potential: {0}".format(err))
    except ArgumentError as err:
        raise click.BadParameter(str(err))


def _default_bc(tok, side, p):
    """Explicit shorthand, else Dirichlet at a finite endpoint and no
    condition at an infinite one."""
    if tok is not None:
        return _bc(tok, side)
    e = p.interval.endpoint(side)
    return BoundaryFunctional.from_vector(side, 0.0, 1.0) \
        if math.isfinite(e) else None


def _load_config(path):
    if path is None:
        return {}
    try:
        with open(path, "r", encoding="utf-8") as fh:
            cfg = json.load(fh)
    except (OSError, ValueError) as err:
        raise click.UsageError("cannot read config {0}: {1}".format(
            path, err))
    if not isinstance(cfg, dict):
        raise click.UsageError("config must be a JSON object of "
                               "option-name: value pairs")
    return {str(k).replace("-", "_"): v for k, v in cfg.items()}


def _fill(ctx, cfg, **values):
    """Options not set on the command line fall back to config values."""
    out = {}
    for name, val in values.items():
        src = ctx.get_parameter_source(name)
        if name in cfg and (src is None
                            or src.name in ("DEFAULT", "DEFAULT_MAP")):
            out[name] = cfg[name]
        else:
            out[name] = val
    return out


def _require(opts, *names):
    for name in names:
        if opts[name] is None:
            raise click.UsageError(
                "missing option --{0} (flag or config)".format(
                    name.replace("_", "-")))


def _emit(text, out):
    if out:
        with open(out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        click.echo(text, nl=False)


def _json_text(payload):
    return json.dumps(payload, sort_keys=True, indent=2,
                      allow_nan=False) + "\n"


def _csv_text(header, rows):
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    return buf.getvalue()


def _realization(p, bc_a, bc_b):
    return Realization(p, BoundarySpec(at_a=_default_bc(bc_a, "a", p),
                                       at_b=_default_bc(bc_b, "b", p)))


def _common(f):
    f = click.option("--potential", default=None,
                     help="potential expression in x, e.g. 'x^2 - 1.5i*x'")(f)
    f = click.option("--interval", default=None,
                     help="open interval 'a,b' (pi/inf words allowed)")(f)
    f = click.option("--config", default=None, type=click.Path(),
                     help="JSON file supplying any missing options")(f)
    f = click.option("--out", default=None, type=click.Path(),
                     help="write output here instead of stdout")(f)
    return f


@click.group(invoke_without_command=True)
@click.pass_context
def cli(ctx):
    """Spectral analysis of -f'' + V f with complex V on an interval."""
    if ctx.invoked_subcommand is None:
        click.echo(ctx.get_help(), err=True)
        raise click.exceptions.Exit(1)


@cli.command("classify")
@_common
@click.option("--lambda", "lam", default="0,1",
              help="spectral parameter 're,im' used by the scans")
@click.pass_context
def classify_cmd(ctx, potential, interval, config, out, lam):
    """Boundary index and square-integrable-dimension report (JSON)."""
    opts = _fill(ctx, _load_config(config), potential=potential,
                 interval=interval, lam=lam, out=out)
    _require(opts, "potential", "interval")
    p = _potential(opts["potential"], opts["interval"])
    report = classify(p, lam=_cnum(opts["lam"], "lambda"))
    _emit(_json_text(report.as_json()), opts["out"])


@cli.command("solve")
@_common
@click.option("--lambda", "lam", default="0,0", help="spectral parameter")
@click.option("--d", "start", default=None,
              help="initial point (interior, or a semiregular endpoint "
                   "with --from-endpoint)")
@click.option("--p0", default="1,0", help="initial value 're,im'")
@click.option("--p1", default="0,0", help="initial slope 're,im'")
@click.option("--g", "forcing", default=None,
              help="forcing expression for (L - lambda) f = g")
@click.option("--span", default=None, help="integration span 'lo,hi'")
@click.option("--from-endpoint", "from_endpoint", default=None,
              type=click.Choice(["a", "b"]),
              help="start from this semiregular endpoint instead of --d "
                   "(--p1 seeds the slope-like coefficient)")
@click.option("--grid", default=201, show_default=True,
              help="number of CSV sample points")
@click.pass_context
def solve_cmd(ctx, potential, interval, config, out, lam, start, p0, p1,
              forcing, span, from_endpoint, grid):
    """Initial-value solution trace: CSV of x, f, f', Lf."""
    opts = _fill(ctx, _load_config(config), potential=potential,
                 interval=interval, lam=lam, start=start, p0=p0, p1=p1,
                 forcing=forcing, span=span, from_endpoint=from_endpoint,
                 grid=grid, out=out)
    _require(opts, "potential", "interval")
    p = _potential(opts["potential"], opts["interval"])
    lam_c = _cnum(opts["lam"], "lambda")
    g = None
    if opts["forcing"] is not None:
        g = _potential(opts["forcing"], opts["interval"]).scalar_fn()
    span_v = None if opts["span"] is None else _pair(opts["span"], "span")
    if opts["from_endpoint"] is not None:
        traj = solve_semiregular(
            p, lam_c, opts["from_endpoint"], _cnum(opts["p1"], "p1"),
            until=None if span_v is None else
            (span_v[1] if opts["from_endpoint"] == "a" else span_v[0]))
    else:
        _require(opts, "start")
        traj = solve_ivp(p, lam_c, _num(opts["start"], "start point"),
                         _cnum(opts["p0"], "p0"), _cnum(opts["p1"], "p1"),
                         g=g, span=span_v)
    n = max(2, int(opts["grid"]))
    xs = np.linspace(traj.span[0], traj.span[1], n)
    rows = []
    for x in xs:
        f, df = (complex(t) for t in traj.eval(x))
        lf = complex(traj.lf(x))
        rows.append([repr(float(x)),
                     repr(f.real), repr(f.imag),
                     repr(df.real), repr(df.imag),
                     repr(lf.real), repr(lf.imag)])
    _emit(_csv_text(["x", "f_re", "f_im", "df_re", "df_im",
                     "lf_re", "lf_im"], rows), opts["out"])


@cli.command("greens")
@_common
@click.option("--lambda", "lam", default="0,1", help="spectral parameter")
@click.option("--kind", default="two_sided", show_default=True,
              type=click.Choice(list(KERNEL_KINDS)))
@click.option("--bc-a", default=None, help="condition at a (d/n/r:../max)")
@click.option("--bc-b", default=None, help="condition at b")
@click.option("--d", "dpoint", default=None,
              help="diagonal point for the at_d kernel")
@click.option("--window", default=None,
              help="truncation window 'lo,hi' for infinite intervals")
@click.option("--grid", default=21, show_default=True,
              help="kernel sample grid is grid x grid")
@click.pass_context
def greens_cmd(ctx, potential, interval, config, out, lam, kind, bc_a,
               bc_b, dpoint, window, grid):
    """Green's kernel samples: CSV of x, y, G_re, G_im."""
    opts = _fill(ctx, _load_config(config), potential=potential,
                 interval=interval, lam=lam, kind=kind, bc_a=bc_a,
                 bc_b=bc_b, dpoint=dpoint, window=window, grid=grid,
                 out=out)
    _require(opts, "potential", "interval")
    p = _potential(opts["potential"], opts["interval"])
    r = _realization(p, opts["bc_a"], opts["bc_b"])
    lam_c = _cnum(opts["lam"], "lambda")
    win = None if opts["window"] is None else _pair(opts["window"],
                                                    "window")
    u, v = shooting_solutions(r, lam_c, window=win)
    d = None
    if str(opts["kind"]) == "at_d":
        lo = max(u.span[0], v.span[0])
        hi = min(u.span[1], v.span[1])
        d = 0.5 * (lo + hi) if opts["dpoint"] is None else \
            _num(opts["dpoint"], "diagonal point")
    k = build_kernel(str(opts["kind"]), u, v, d=d)
    lo = max(u.span[0], v.span[0])
    hi = min(u.span[1], v.span[1])
    n = max(2, int(opts["grid"]))
    xs = np.linspace(lo, hi, n)
    rows = []
    for x in xs:
        for y in xs:
            gval = kernel_eval(k, float(x), float(y))
            rows.append([repr(float(x)), repr(float(y)),
                         repr(gval.real), repr(gval.imag)])
    _emit(_csv_text(["x", "y", "G_re", "G_im"], rows), opts["out"])


@cli.command("spectrum")
@_common
@click.option("--bc-a", default=None, help="condition at a (d/n/r:../max)")
@click.option("--bc-b", default=None, help="condition at b")
@click.option("--region", default=None,
              help="search rectangle 're0,re1,im0,im1'")
@click.option("--max-roots", default=16, show_default=True)
@click.option("--max-evals", default=20000, show_default=True,
              help="characteristic-function evaluation budget")
@click.option("--oracle-n", default=None, type=int,
              help="cross-check roots against the finite-difference "
                   "oracle extrapolated over n, 2n, 4n")
@click.option("--window", default=None,
              help="oracle truncation window 'lo,hi'")
@click.pass_context
def spectrum_cmd(ctx, potential, interval, config, out, bc_a, bc_b,
                 region, max_roots, max_evals, oracle_n, window):
    """Eigenvalues in a rectangle: JSON list with residuals and
    multiplicities."""
    opts = _fill(ctx, _load_config(config), potential=potential,
                 interval=interval, bc_a=bc_a, bc_b=bc_b, region=region,
                 max_roots=max_roots, max_evals=max_evals,
                 oracle_n=oracle_n, window=window, out=out)
    _require(opts, "potential", "interval", "region")
    p = _potential(opts["potential"], opts["interval"])
    r = _realization(p, opts["bc_a"], opts["bc_b"])
    roots = find_eigenvalues(r, _rect(opts["region"]),
                             max_roots=int(opts["max_roots"]),
                             max_evals=int(opts["max_evals"]))
    payload = [ev.as_json() for ev in roots]
    if opts["oracle_n"] is not None:
        n = int(opts["oracle_n"])
        win = None if opts["window"] is None else _pair(opts["window"],
                                                        "window")
        ext, _rows = richardson_eigenvalues(
            r, count=max(len(roots), 3), ns=(n, 2 * n, 4 * n), window=win)
        for entry, ev in zip(payload, roots):
            near = ext[np.argmin(np.abs(ext - ev.lam))]
            entry["oracle_lambda"] = [near.real, near.imag]
            entry["oracle_rel_error"] = abs(near - ev.lam) / max(
                abs(ev.lam), 1e-300)
    _emit(_json_text(payload), opts["out"])


@cli.command("weyl")
@_common
@click.option("--lambda", "lam", default="0,1", help="spectral parameter "
              "(nonreal for the disk machinery)")
@click.option("--d0", default=None, help="first cutoff (interior point)")
@click.option("--gamma", default=1.4, show_default=True,
              help="cutoff growth factor (infinite endpoint)")
@click.option("--shrink", default=0.6, show_default=True,
              help="cutoff approach factor (finite endpoint)")
@click.option("--max-steps", default=60, show_default=True)
@click.pass_context
def weyl_cmd(ctx, potential, interval, config, out, lam, d0, gamma,
             shrink, max_steps):
    """Nested-disk trichotomy at the right endpoint (JSON report)."""
    opts = _fill(ctx, _load_config(config), potential=potential,
                 interval=interval, lam=lam, d0=d0, gamma=gamma,
                 shrink=shrink, max_steps=max_steps, out=out)
    _require(opts, "potential", "interval")
    p = _potential(opts["potential"], opts["interval"])
    report = trichotomy(
        p, _cnum(opts["lam"], "lambda"),
        d0=None if opts["d0"] is None else _num(opts["d0"], "d0"),
        gamma=_num(opts["gamma"], "gamma"),
        shrink=_num(opts["shrink"], "shrink"),
        max_steps=int(opts["max_steps"]))
    _emit(_json_text(report.as_json()), opts["out"])


@cli.command("dissipativity")
@_common
@click.option("--bc-a", default=None, help="condition at a (d/n/r:../max)")
@click.option("--bc-b", default=None, help="condition at b")
@click.option("--probes", default=1000, show_default=True,
              help="number of Im V probe points")
@click.pass_context
def dissipativity_cmd(ctx, potential, interval, config, out, bc_a, bc_b,
                      probes):
    """Dissipativity certificate for a boundary realization (JSON)."""
    opts = _fill(ctx, _load_config(config), potential=potential,
                 interval=interval, bc_a=bc_a, bc_b=bc_b, probes=probes,
                 out=out)
    _require(opts, "potential", "interval")
    p = _potential(opts["potential"], opts["interval"])
    spec = BoundarySpec(at_a=_default_bc(opts["bc_a"], "a", p),
                        at_b=_default_bc(opts["bc_b"], "b", p))
    cert = dissipativity_certificate(p, spec, probes=int(opts["probes"]))
    _emit(_json_text(cert.as_json()), opts["out"])


@cli.command("oracle")
@_common
@click.option("--bc-a", default=None, help="condition at a (d/n/r:../max)")
@click.option("--bc-b", default=None, help="condition at b")
@click.option("--n", "grid_n", default=400, show_default=True,
              help="number of grid panels")
@click.option("--window", default=None,
              help="truncation window 'lo,hi' for infinite intervals")
@click.option("--count", default=6, show_default=True,
              help="how many smallest-|lambda| eigenvalues to report")
@click.option("--richardson/--no-richardson", default=False,
              help="extrapolate over n, 2n, 4n")
@click.option("--range-samples", default=0, show_default=True,
              help="also sample the numerical range this many times")
@click.option("--seed", default=0, show_default=True,
              help="seed for the numerical-range sample vectors")
@click.pass_context
def oracle_cmd(ctx, potential, interval, config, out, bc_a, bc_b, grid_n,
               window, count, richardson, range_samples, seed):
    """Finite-difference oracle: eigenvalues and numerical range (JSON)."""
    opts = _fill(ctx, _load_config(config), potential=potential,
                 interval=interval, bc_a=bc_a, bc_b=bc_b, grid_n=grid_n,
                 window=window, count=count, richardson=richardson,
                 range_samples=range_samples, seed=seed, out=out)
    _require(opts, "potential", "interval")
    p = _potential(opts["potential"], opts["interval"])
    r = _realization(p, opts["bc_a"], opts["bc_b"])
    win = None if opts["window"] is None else _pair(opts["window"],
                                                    "window")
    n = int(opts["grid_n"])
    count = int(opts["count"])
    m = fd_oracle_build(r, n, window=win)
    payload = m.as_json()
    evs = m.eigenvalues()[:count]
    payload["eigenvalues"] = [[z.real, z.imag] for z in evs]
    if opts["richardson"]:
        ext, _rows = richardson_eigenvalues(r, count=count,
                                            ns=(n, 2 * n, 4 * n),
                                            window=win)
        payload["richardson"] = [[z.real, z.imag] for z in ext]
    samples = int(opts["range_samples"])
    if samples > 0:
        nr = fd_numerical_range(m, samples=samples, seed=int(opts["seed"]))
        payload["numerical_range"] = [[z.real, z.imag] for z in nr]
    _emit(_json_text(payload), opts["out"])


def main(argv=None):
    """Entry point with the documented exit-code contract."""
    try:
        rv = cli.main(args=argv, standalone_mode=False)
        return int(rv) if isinstance(rv, int) else 0
    except click.exceptions.Exit as err:
        return int(err.exit_code)
    except click.UsageError as err:
        err.show()
        return 1
    except click.ClickException as err:
        err.show()
        return 1
    except ComplexSturmError as err:
        click.echo("{0}: {1}".format(type(err).__name__, err), err=True)
        return 2


if __name__ == "__main__":
    sys.exit(main())
