"""CLI entry point for oscint."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from pathlib import Path  # noqa: TC003 (typer resolves it at runtime)
from typing import TYPE_CHECKING, Annotated, Any

import numpy as np
import typer
from pydantic import ValidationError
from rich.console import Console
from rich.logging import RichHandler

from oscint import __version__
from oscint.config import (
    ReportFormat,
    RunConfig,
    Subcommand,
    load_config_file,
    load_curve,
    merge_options,
    resolve_threads,
    validation_message,
)
from oscint.errors import CheckFailedError, OscintError
from oscint.models import BoundaryKind, Convention, PlaneWaveParams, PlaneWaveVerdict
from oscint.report import Report, write_report

if TYPE_CHECKING:
    from collections.abc import Callable

    from oscint.config import (
        AlphaStarOptions,
        EigenOptions,
        GeometryOptions,
        LeibnizOptions,
        PhaseOptions,
        PlaneWaveOptions,
        RigidityOptions,
        SelftestOptions,
    )
    from oscint.curve import SupportCurve
    from oscint.models import RigidityReport

app = typer.Typer(
    name="oscint",
    help="Oscillatory boundary integrals and overdetermined eigenproblems on convex curves.",
    no_args_is_help=True,
)
planewave_app = typer.Typer(help="Plane-wave boundary integrals.", no_args_is_help=True)
app.add_typer(planewave_app, name="planewave")
console = Console(stderr=True)

logger = logging.getLogger(__name__)

PLANEWAVE_COLUMNS = [
    "dir_rad",
    "lambda",
    "t",
    "re_int",
    "im_int",
    "abs_int",
    "abs_surrogate",
    "abs_resid",
    "resid_times_lambda",
    "admissible",
]


@dataclass
class GlobalOptions:
    verbose: bool = False
    config: Path | None = None
    format: ReportFormat | None = None
    output: Path | None = None
    seed: int | None = None
    threads: int | None = None


def version_callback(value: bool) -> None:
    if value:
        console.print(f"oscint v{__version__}")
        raise typer.Exit


def _configure_logging(verbose: bool) -> None:
    logging.basicConfig(
        level=logging.DEBUG if verbose else logging.WARNING,
        format="%(message)s",
        datefmt="[%X]",
        handlers=[RichHandler(console=console, show_path=False, rich_tracebacks=verbose)],
        force=True,
    )


@app.callback()
def main(
    ctx: typer.Context,
    verbose: Annotated[
        bool,
        typer.Option(
            "--verbose", "-v", help="Debug logging and human-readable summaries on stderr."
        ),
    ] = False,
    config: Annotated[
        Path | None,
        typer.Option(
            "--config",
            "-c",
            help="JSON or TOML file with one table per subcommand.",
            exists=True,
            dir_okay=False,
        ),
    ] = None,
    fmt: Annotated[
        ReportFormat | None,
        typer.Option("--format", "-f", help="Report format."),
    ] = None,
    output: Annotated[
        Path | None,
        typer.Option(
            "--output", "-o", help="Write the report here instead of stdout.", dir_okay=False
        ),
    ] = None,
    seed: Annotated[
        int | None,
        typer.Option(
            "--seed", help="RNG seed for randomized checks and interior points (default 42)."
        ),
    ] = None,
    threads: Annotated[
        int | None,
        typer.Option(
            "--threads", help="Parallel workers for sweeps (default $OSCINT_THREADS or 1)."
        ),
    ] = None,
    _version: Annotated[
        bool,
        typer.Option(
            "--version",
            "-V",
            callback=version_callback,
            is_eager=True,
            help="Show version and exit.",
        ),
    ] = False,
) -> None:
    """Oscillatory integrals, stationary phase and overdetermined eigenproblems."""
    _configure_logging(verbose)
    ctx.obj = GlobalOptions(
        verbose=verbose, config=config, format=fmt, output=output, seed=seed, threads=threads
    )


# -- dispatch -----------------------------------------------------------------------


def build_config(
    globals_: GlobalOptions, subcommand: Subcommand, curve: str | None, flags: dict[str, Any]
) -> RunConfig:
    """Apply flags > config file > defaults and validate the result."""
    file_data = load_config_file(globals_.config) if globals_.config is not None else {}
    file_globals = file_data.get("global", {})
    run_flags = {
        "format": globals_.format,
        "output": globals_.output,
        "seed": globals_.seed,
        "curve": curve,
    }
    resolved = merge_options(file_globals, run_flags)
    resolved["threads"] = resolve_threads(globals_.threads or file_globals.get("threads"))
    return RunConfig(
        subcommand=subcommand,
        verbose=globals_.verbose,
        options=merge_options(file_data.get(subcommand.value), flags),
        **resolved,
    )


def _dispatch(
    ctx: typer.Context, subcommand: Subcommand, curve: str | None, flags: dict[str, Any]
) -> None:
    globals_: GlobalOptions = ctx.obj or GlobalOptions()
    try:
        config = build_config(globals_, subcommand, curve, flags)
    except ValidationError as e:
        console.print(f"[red]Error:[/red] {validation_message(e)}")
        raise typer.Exit(code=1) from None
    except OscintError as e:
        console.print(f"[red]Error:[/red] {e}")
        raise typer.Exit(code=e.exit_code) from None
    code = run(config)
    if code:
        raise typer.Exit(code=code)


def run(config: RunConfig) -> int:
    """Execute one resolved invocation, write its report, and return the exit code."""
    try:
        report = HANDLERS[config.subcommand](config)
        write_report(report, config.format, config.output)
        if report.failed:
            msg = f"{config.subcommand} checks failed; the report comments list them"
            raise CheckFailedError(msg)
    except ValidationError as e:
        console.print(f"[red]Error:[/red] {validation_message(e)}")
        return 1
    except OscintError as e:
        console.print(f"[red]Error:[/red] {e}")
        if config.verbose:
            console.print_exception()
        return e.exit_code
    return 0


def _convention(literal_signs: bool) -> Convention:
    return Convention.LITERAL if literal_signs else Convention.HORMANDER


def _curve(config: RunConfig) -> SupportCurve:
    assert config.curve is not None
    return load_curve(config.curve)


# -- handlers -----------------------------------------------------------------------


def _run_leibniz(config: RunConfig) -> Report:
    from oscint.opcalc import expansion_checks, leibniz_table, table_identity_checks

    opts: LeibnizOptions = config.parsed_options()
    table = leibniz_table(opts.nmax)
    rows: list[list[Any]] = [[n, k, d] for n, k, d in table.rows()]
    comments: list[str] = []
    failed = False
    if opts.check:
        rng = np.random.default_rng(config.seed)
        checks = table_identity_checks(opts.nmax) + expansion_checks(opts.nmax, rng, opts.pairs)
        if config.verbose:
            from oscint.viz import render_checks

            render_checks(checks, console)
        bad = [check for check in checks if not check.passed]
        failed = bool(bad)
        comments.append(f"seed={config.seed}")
        if bad:
            comments.extend(f"check failed: {check.name} (error {check.error:g})" for check in bad)
        else:
            comments.append("all checks passed")
    return Report(columns=["n", "k", "d"], rows=rows, comments=comments, failed=failed)


def _run_phase(config: RunConfig) -> Report:
    from oscint.stphase import ENVELOPE_SAMPLES, convergence_scan

    opts: PhaseOptions = config.parsed_options()
    scan = convergence_scan(
        _curve(config),
        opts.direction,
        opts.t,
        opts.lambdas,
        _convention(opts.literal_signs),
        allow_inadmissible=opts.allow_inadmissible,
        n_jobs=config.threads,
    )
    if config.verbose:
        from oscint.viz import render_convergence

        render_convergence(scan, console)
    rows: list[list[Any]] = [
        [row.lam, row.abs_integral, row.resid_l0, row.resid_l01] for row in scan.rows
    ]
    comments = [
        f"convention={_convention(opts.literal_signs)}",
        f"slope_L0={scan.slope_l0!r}",
        f"slope_L01={scan.slope_l01!r}",
        f"gamma={scan.gamma!r}",
        f"envelope_samples={ENVELOPE_SAMPLES}",
    ]
    inadmissible = [row.lam for row in scan.rows if not row.admissible]
    if inadmissible:
        comments.append(f"inadmissible_lambdas={len(inadmissible)}/{len(scan.rows)}")
    return Report(
        columns=["lambda", "abs_integral", "resid_L0", "resid_L01"], rows=rows, comments=comments
    )


def _planewave_rows(report: RigidityReport) -> list[list[Any]]:
    return [
        [
            row.direction,
            row.lam,
            row.t,
            row.integral.real,
            row.integral.imag,
            abs(row.integral),
            abs(row.surrogate),
            row.abs_resid,
            row.resid_times_lambda,
            row.admissible,
        ]
        for row in report.rows
    ]


def _planewave_comments(report: RigidityReport) -> list[str]:
    comments = [
        f"verdict={report.verdict}",
        f"best_level=lambda:{report.best_level[0]!r},t:{report.best_level[1]!r}",
        f"best_level_max={report.best_level_max!r}",
        f"tol={report.tol!r}",
    ]
    if report.witness_direction is not None:
        comments.append(f"witness_dir_rad={report.witness_direction!r}")
    return comments


def _run_planewave(config: RunConfig) -> Report:
    from oscint.planewave import rigidity_scan

    opts: PlaneWaveOptions = config.parsed_options()
    params_grid = [PlaneWaveParams.from_alpha(opts.alpha, t, opts.direction) for t in opts.t]
    report = rigidity_scan(
        _curve(config),
        opts.kind,
        params_grid,
        opts.dirs,
        tol=opts.tol,
        allow_inadmissible=opts.allow_inadmissible,
        convention=_convention(opts.literal_signs),
        n_jobs=config.threads,
    )
    if config.verbose:
        from oscint.viz import render_rigidity_report

        render_rigidity_report(report, console)
    return Report(
        columns=PLANEWAVE_COLUMNS,
        rows=_planewave_rows(report),
        comments=_planewave_comments(report),
    )


def _run_alpha_star(config: RunConfig) -> Report:
    from oscint.curve import point_at
    from oscint.planewave import alpha_star, gamma_of, threshold_lambda, threshold_t
    from oscint.stphase import critical_angles

    opts: AlphaStarOptions = config.parsed_options()
    curve = _curve(config)
    params = PlaneWaveParams.from_direction(1.0, 0.0, opts.direction)
    theta_max, theta_min = critical_angles(params)
    p, p_star = point_at(curve, theta_min), point_at(curve, theta_max)
    offset = np.subtract(p_star.position, p.position)
    p_star_x = float(np.dot(params.eta, offset))
    gamma = gamma_of(curve)
    t_star = threshold_t(p.curvature, p_star.curvature, p_star_x, opts.c_star, opts.eps)
    lambda_star = threshold_lambda(opts.m_sum, p.curvature, gamma, t_star)
    alpha = alpha_star(lambda_star, t_star)
    rows: list[list[Any]] = [
        ["k_p", p.curvature],
        ["k_pstar", p_star.curvature],
        ["p_star_x", p_star_x],
        ["gamma", gamma],
        ["t_star", t_star],
        ["lambda_star", lambda_star],
        ["alpha_star", alpha],
    ]
    return Report(
        columns=["property", "value"],
        rows=rows,
        comments=[f"m_sum={opts.m_sum!r}", f"c_star={opts.c_star!r}", f"eps={opts.eps!r}"],
    )


def _run_eigen(config: RunConfig) -> Report:
    from oscint.helmholtz import rigidity_verdict

    opts: EigenOptions = config.parsed_options()
    cfg = opts.scan_config(config.seed)
    assessment = rigidity_verdict(
        _curve(config), opts.kind, cfg, dev_tol=opts.dev_tol, n_jobs=config.threads
    )
    if config.verbose:
        from oscint.viz import render_eigen

        render_eigen(assessment, console)
    rows: list[list[Any]] = [
        [mode.alpha, mode.multiplicity, mode.deviation] for mode in assessment.modes
    ]
    comments = [
        f"verdict={assessment.verdict}",
        f"min_deviation={assessment.min_deviation!r}",
        f"hits={len(assessment.hits)}",
        f"rejected={len(assessment.rejected)}",
    ]
    comments.extend(
        f"cross_check alpha={alpha!r}: {verdict}"
        for alpha, verdict in sorted(assessment.cross_checks.items())
    )
    comments.append(f"seed={config.seed}")
    return Report(columns=["alpha", "multiplicity", "deviation"], rows=rows, comments=comments)


def _run_geometry(config: RunConfig) -> Report:
    from oscint.curve import symmetry_and_circle_certificate, width_profile

    opts: GeometryOptions = config.parsed_options()
    curve = _curve(config)
    cert = symmetry_and_circle_certificate(curve, tol=opts.tol)
    width = width_profile(curve, n_samples=opts.samples, tol=opts.tol)
    if config.verbose:
        from oscint.viz import render_geometry

        render_geometry(curve, cert, width, console)
    rows: list[list[Any]] = [
        ["kind", str(curve.kind)],
        ["perimeter", curve.perimeter],
        ["area", curve.area],
        ["width_min", width.w_min],
        ["width_max", width.w_max],
        ["breadth", width.breadth if width.breadth is not None else math.nan],
        ["center_x", cert.center[0]],
        ["center_y", cert.center[1]],
        ["max_odd_harmonic", cert.max_odd_harmonic],
        ["max_even_harmonic", cert.max_even_harmonic],
        ["constant_width", cert.constant_width],
        ["centrally_symmetric", cert.centrally_symmetric],
        ["is_circle", cert.is_circle],
    ]
    return Report(columns=["property", "value"], rows=rows, comments=[f"tol={opts.tol!r}"])


def _run_rigidity(config: RunConfig) -> Report:
    from oscint.rigidity import assess_rigidity

    opts: RigidityOptions = config.parsed_options()
    assessment = assess_rigidity(
        _curve(config),
        opts.kind,
        opts.alpha,
        opts.t,
        opts.dirs,
        dev_tol=opts.dev_tol,
        half_width=opts.half_width,
        seed=config.seed,
        n_jobs=config.threads,
    )
    if config.verbose:
        from oscint.viz import render_assessment

        render_assessment(assessment, console)
    comments = [
        f"verdict={assessment.verdict}",
        f"alpha={assessment.alpha!r}",
        f"plane_wave={assessment.plane_wave.verdict}",
        f"plane_wave_max={assessment.plane_wave.best_level_max!r}",
        f"eigen={assessment.eigen_verdict}",
    ]
    if assessment.eigen is not None:
        comments.append(f"min_deviation={assessment.eigen.min_deviation!r}")
    if assessment.verdict is PlaneWaveVerdict.NOT_DISK:
        witness = assessment.plane_wave.witness_direction
        if witness is not None:
            comments.append(f"witness_dir_rad={witness!r}")
    comments.append(f"seed={config.seed}")
    return Report(
        columns=PLANEWAVE_COLUMNS, rows=_planewave_rows(assessment.plane_wave), comments=comments
    )


def _run_selftest(config: RunConfig) -> Report:
    from oscint.opcalc import expansion_checks, table_identity_checks
    from oscint.planewave import oracle_checks
    from oscint.specfun import identity_checks

    opts: SelftestOptions = config.parsed_options()
    rng = np.random.default_rng(config.seed)
    checks = [
        *identity_checks(),
        *table_identity_checks(),
        *expansion_checks(opts.nmax, rng, opts.pairs),
        *oracle_checks(),
    ]
    if config.verbose:
        from oscint.viz import render_checks

        render_checks(checks, console)
    rows: list[list[Any]] = [
        [check.name, float(check.error), float(check.tolerance), check.passed] for check in checks
    ]
    failed = not all(check.passed for check in checks)
    comments = [f"seed={config.seed}", "some checks failed" if failed else "all checks passed"]
    return Report(
        columns=["check", "max_error", "tolerance", "passed"],
        rows=rows,
        comments=comments,
        failed=failed,
    )


HANDLERS: dict[Subcommand, Callable[[RunConfig], Report]] = {
    Subcommand.LEIBNIZ: _run_leibniz,
    Subcommand.PHASE: _run_phase,
    Subcommand.PLANEWAVE: _run_planewave,
    Subcommand.ALPHA_STAR: _run_alpha_star,
    Subcommand.EIGEN: _run_eigen,
    Subcommand.GEOMETRY: _run_geometry,
    Subcommand.RIGIDITY: _run_rigidity,
    Subcommand.SELFTEST: _run_selftest,
}


# -- commands -----------------------------------------------------------------------

CurveArg = Annotated[
    str,
    typer.Option(
        "--curve", help="Curve JSON file or registered name (disk, ellipse, reuleaux3, ...)."
    ),
]
KindOpt = Annotated[BoundaryKind | None, typer.Option("--kind", help="Boundary condition.")]
DirectionOpt = Annotated[
    float | None, typer.Option("--direction", help="Direction φ of ξ in radians.")
]
DevTolOpt = Annotated[
    float | None, typer.Option("--dev-tol", help="Deviation below which a mode is a hit.")
]


@app.command()
def leibniz(
    ctx: typer.Context,
    nmax: Annotated[
        int | None, typer.Option("--nmax", help="Largest power n of the table.")
    ] = None,
    check: Annotated[
        bool, typer.Option("--check", help="Verify identities and the formula against brute force.")
    ] = False,
    pairs: Annotated[
        int | None,
        typer.Option("--pairs", help="Random polynomial pairs per dimension for --check."),
    ] = None,
) -> None:
    """Coefficient table d_k^n of □ⁿ(uv) (columns n, k, d)."""
    _dispatch(ctx, Subcommand.LEIBNIZ, None, {"nmax": nmax, "check": check or None, "pairs": pairs})


@app.command()
def phase(
    ctx: typer.Context,
    curve: CurveArg,
    direction: DirectionOpt = None,
    t: Annotated[float | None, typer.Option("--t", help="Exponential tilt t ≥ 0.")] = None,
    lambda_grid: Annotated[
        str | None, typer.Option("--lambda-grid", help="A:B:*r, A:B:+d or a comma list.")
    ] = None,
    literal_signs: Annotated[
        bool,
        typer.Option(
            "--literal-signs",
            "--paper-signs",
            help="Uniform-sign first correction (negative control).",
        ),
    ] = False,
    allow_inadmissible: Annotated[
        bool,
        typer.Option("--allow-inadmissible", help="Run even when e^(2γt) > √λ everywhere."),
    ] = False,
) -> None:
    """Stationary-phase residuals against quadrature over a λ-grid."""
    _dispatch(
        ctx,
        Subcommand.PHASE,
        curve,
        {
            "direction": direction,
            "t": t,
            "lambda_grid": lambda_grid,
            "literal_signs": literal_signs or None,
            "allow_inadmissible": allow_inadmissible or None,
        },
    )


@planewave_app.command("scan")
def planewave_scan(
    ctx: typer.Context,
    curve: CurveArg,
    kind: KindOpt = None,
    alpha: Annotated[float | None, typer.Option("--alpha", help="Level α = λ² - t².")] = None,
    t: Annotated[str | None, typer.Option("--t", help="Comma-separated t values.")] = None,
    dirs: Annotated[int | None, typer.Option("--dirs", help="Number of directions.")] = None,
    tol: Annotated[
        float | None, typer.Option("--tol", help="Verdict tolerance (default 1e-6·perimeter).")
    ] = None,
    allow_inadmissible: Annotated[
        bool, typer.Option("--allow-inadmissible", help="Run inadmissible (λ, t) levels.")
    ] = False,
    literal_signs: Annotated[
        bool,
        typer.Option(
            "--literal-signs",
            "--paper-signs",
            help="Uniform-sign first correction in the surrogate.",
        ),
    ] = False,
) -> None:
    """Boundary integrals and two-point surrogates over a direction grid."""
    _dispatch(
        ctx,
        Subcommand.PLANEWAVE,
        curve,
        {
            "kind": kind,
            "alpha": alpha,
            "t": t,
            "dirs": dirs,
            "tol": tol,
            "allow_inadmissible": allow_inadmissible or None,
            "literal_signs": literal_signs or None,
        },
    )


@planewave_app.command("alpha-star")
def planewave_alpha_star(
    ctx: typer.Context,
    curve: CurveArg,
    direction: DirectionOpt = None,
    m_sum: Annotated[float | None, typer.Option("--m-sum", help="M₁ + M₂.")] = None,
    c_star: Annotated[float | None, typer.Option("--c-star", help="C_* ≥ 1.")] = None,
    eps: Annotated[float | None, typer.Option("--eps", help="ε ≥ 0.")] = None,
) -> None:
    """Eigenvalue threshold α* = λ*² - t*² from user-supplied constants."""
    _dispatch(
        ctx,
        Subcommand.ALPHA_STAR,
        curve,
        {"direction": direction, "m_sum": m_sum, "c_star": c_star, "eps": eps},
    )


@app.command()
def eigen(
    ctx: typer.Context,
    curve: CurveArg,
    kind: KindOpt = None,
    alpha_window: Annotated[
        str | None, typer.Option("--alpha-window", help="Scan window A:B.")
    ] = None,
    dev_tol: DevTolOpt = None,
    scan_step: Annotated[float | None, typer.Option("--scan-step", help="α grid step.")] = None,
    basis_order: Annotated[
        int | None, typer.Option("--basis-order", help="Fourier–Bessel order M.")
    ] = None,
) -> None:
    """Eigenvalues in a window and the deviation of their overdetermined boundary data."""
    _dispatch(
        ctx,
        Subcommand.EIGEN,
        curve,
        {
            "kind": kind,
            "alpha_window": alpha_window,
            "dev_tol": dev_tol,
            "scan_step": scan_step,
            "basis_order": basis_order,
        },
    )


@app.command()
def geometry(
    ctx: typer.Context,
    curve: CurveArg,
    tol: Annotated[float | None, typer.Option("--tol", help="Certificate tolerance.")] = None,
) -> None:
    """Perimeter, width, symmetry and circle certificate of a curve."""
    _dispatch(ctx, Subcommand.GEOMETRY, curve, {"tol": tol})


@app.command()
def rigidity(
    ctx: typer.Context,
    curve: CurveArg,
    alpha: Annotated[float | None, typer.Option("--alpha", help="Candidate eigenvalue α.")] = None,
    t: Annotated[str | None, typer.Option("--t", help="Comma-separated t values.")] = None,
    dirs: Annotated[int | None, typer.Option("--dirs", help="Number of directions.")] = None,
    kind: KindOpt = None,
    dev_tol: DevTolOpt = None,
) -> None:
    """Plane-wave and eigen evidence combined into one verdict."""
    _dispatch(
        ctx,
        Subcommand.RIGIDITY,
        curve,
        {"alpha": alpha, "t": t, "dirs": dirs, "kind": kind, "dev_tol": dev_tol},
    )


@app.command()
def selftest(ctx: typer.Context) -> None:
    """Bessel, coefficient-table and disk-oracle identity checks."""
    _dispatch(ctx, Subcommand.SELFTEST, None, {})
