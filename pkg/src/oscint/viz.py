"""Terminal summaries of geometry, plane-wave, eigen and rigidity results."""

from __future__ import annotations

import math
from typing import TYPE_CHECKING

import numpy as np
from rich.console import Console
from rich.panel import Panel
from rich.table import Table
from rich.text import Text

from oscint.models import EigenVerdict, PlaneWaveVerdict

if TYPE_CHECKING:
    from oscint.curve import SupportCurve
    from oscint.models import (
        CheckResult,
        ConvergenceScan,
        EigenAssessment,
        RigidityAssessment,
        RigidityReport,
        SymmetryCertificate,
        WidthProfile,
    )

HARMONIC_BARS = 12


def _verdict_style(verdict: PlaneWaveVerdict | EigenVerdict) -> str:
    good = (PlaneWaveVerdict.DISK_CONSISTENT, EigenVerdict.OVERDETERMINED_SOLVABLE)
    return "bold green" if verdict in good else "bold red"


def render_geometry(
    curve: SupportCurve,
    cert: SymmetryCertificate,
    width: WidthProfile,
    console: Console | None = None,
) -> None:
    """Render the shape facts of a curve."""
    if console is None:
        console = Console(stderr=True)

    info_table = Table(show_header=False, box=None, padding=(0, 2))
    info_table.add_column("Key", style="bold cyan")
    info_table.add_column("Value")
    info_table.add_row("Kind", str(curve.kind))
    info_table.add_row("Perimeter", f"{curve.perimeter:.12g}")
    info_table.add_row("Area", f"{curve.area:.12g}")
    info_table.add_row("Width", f"[{width.w_min:.10g}, {width.w_max:.10g}]")
    info_table.add_row("Center", f"({cert.center[0]:.6g}, {cert.center[1]:.6g})")
    info_table.add_row("Constant width", _yes_no(cert.constant_width))
    info_table.add_row("Centrally symmetric", _yes_no(cert.centrally_symmetric))
    info_table.add_row("Circle", _yes_no(cert.is_circle))

    console.print()
    console.print(Panel(info_table, title="Curve Geometry", border_style="green"))

    bars = _render_harmonics(curve)
    if bars is not None:
        console.print()
        console.print(Panel(bars, title="Support Harmonics", border_style="blue"))
    console.print()


def _yes_no(flag: bool) -> Text:
    return Text("yes", style="green") if flag else Text("no", style="red")


def _render_harmonics(curve: SupportCurve) -> Text | None:
    """One bar per harmonic n ≥ 2, log-scaled, odd in yellow and even in magenta."""
    a0, c, s = curve.harmonics(HARMONIC_BARS)
    amplitude = np.hypot(c, s)[1:]
    if amplitude.size == 0:
        return None

    text = Text()
    for n, amp in enumerate(amplitude, start=2):
        level = 0 if amp <= 1e-16 * a0 else max(1, min(16, int(16 + math.log10(amp / a0))))
        style = "yellow" if n % 2 else "magenta"
        text.append(f"{n:>3} ", style="dim")
        text.append("█" * level, style=style)
        text.append(f" {amp:.2e}\n")

    text.append("\n")
    text.append("█", style="yellow")
    text.append("=odd (breaks central symmetry)  ")
    text.append("█", style="magenta")
    text.append("=even (breaks constant width)")
    return text


def render_rigidity_report(report: RigidityReport, console: Console | None = None) -> None:
    """Render a plane-wave direction scan."""
    if console is None:
        console = Console(stderr=True)

    table = Table(title=f"{report.kind.title()} plane-wave integrals", box=None)
    table.add_column("dir (rad)", style="dim")
    table.add_column("λ")
    table.add_column("t")
    table.add_column("|I|")
    table.add_column("|I - S|·λ")
    table.add_column("adm.")
    for row in report.rows:
        table.add_row(
            f"{row.direction:.4f}",
            f"{row.lam:.6g}",
            f"{row.t:.4g}",
            f"{abs(row.integral):.3e}",
            f"{row.resid_times_lambda:.3e}",
            _yes_no(row.admissible),
        )

    console.print()
    console.print(table)
    verdict = Text(str(report.verdict), style=_verdict_style(report.verdict))
    verdict.append(
        f"  (best level max {report.best_level_max:.3e}, tol {report.tol:.1e})", style="dim"
    )
    console.print(verdict)
    console.print()


def render_eigen(assessment: EigenAssessment, console: Console | None = None) -> None:
    """Render eigenvalues and deviations of one window."""
    if console is None:
        console = Console(stderr=True)

    table = Table(title=f"{assessment.kind.title()} modes in {assessment.window}", box=None)
    table.add_column("α", style="yellow")
    table.add_column("mult.")
    table.add_column("σ")
    table.add_column("deviation")
    hits = {id(mode) for mode in assessment.hits}
    for mode in assessment.modes:
        deviation = Text(f"{mode.deviation:.3e}", style="bold green" if id(mode) in hits else "")
        table.add_row(f"{mode.alpha:.10f}", str(mode.multiplicity), f"{mode.sigma:.2e}", deviation)

    console.print()
    console.print(table)
    console.print(Text(str(assessment.verdict), style=_verdict_style(assessment.verdict)))
    console.print()


def render_assessment(assessment: RigidityAssessment, console: Console | None = None) -> None:
    """Render the combined rigidity verdict with both strands of evidence."""
    if console is None:
        console = Console(stderr=True)

    info_table = Table(show_header=False, box=None, padding=(0, 2))
    info_table.add_column("Key", style="bold cyan")
    info_table.add_column("Value")
    info_table.add_row("Eigenvalue α", f"{assessment.alpha:.12g}")
    info_table.add_row(
        "Plane waves",
        Text(
            str(assessment.plane_wave.verdict),
            style=_verdict_style(assessment.plane_wave.verdict),
        ),
    )
    info_table.add_row(
        "Eigen modes",
        Text(str(assessment.eigen_verdict), style=_verdict_style(assessment.eigen_verdict)),
    )
    if assessment.eigen is not None:
        info_table.add_row("Min deviation", f"{assessment.eigen.min_deviation:.3e}")

    console.print()
    console.print(
        Panel(
            info_table,
            title=f"Rigidity: {assessment.verdict}",
            border_style=(
                "green" if assessment.verdict is PlaneWaveVerdict.DISK_CONSISTENT else "red"
            ),
        )
    )
    console.print()


def render_convergence(scan: ConvergenceScan, console: Console | None = None) -> None:
    if console is None:
        console = Console(stderr=True)

    table = Table(title="Stationary-phase residuals", box=None)
    table.add_column("λ", style="dim")
    table.add_column("|I|")
    table.add_column("resid L₀")
    table.add_column("resid L₀+L₁")
    for row in scan.rows:
        table.add_row(
            f"{row.lam:.6g}",
            f"{row.abs_integral:.3e}",
            f"{row.resid_l0:.3e}",
            f"{row.resid_l01:.3e}",
        )

    console.print()
    console.print(table)
    console.print(f"slopes: L₀ {scan.slope_l0:.3f}, L₀+L₁ {scan.slope_l01:.3f}", style="cyan")
    console.print()


def render_checks(checks: list[CheckResult], console: Console | None = None) -> None:
    if console is None:
        console = Console(stderr=True)

    table = Table(title="Self-checks", box=None)
    table.add_column("Check", style="cyan")
    table.add_column("Error")
    table.add_column("Tolerance", style="dim")
    table.add_column("")
    for check in checks:
        mark = Text("ok", style="green") if check.passed else Text("FAIL", style="bold red")
        table.add_row(check.name, f"{check.error:.2e}", f"{check.tolerance:.0e}", mark)

    console.print()
    console.print(table)
    console.print()
