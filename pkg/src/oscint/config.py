"""Validated configuration: curve files, eigen scans, and per-subcommand options.

Precedence is flags > config file > model defaults. A config file is JSON or
TOML with one table per subcommand, e.g.

    [eigen]
    kind = "neumann"
    alpha_window = "14:16"
"""

from __future__ import annotations

import json
import logging
import math
import os
import tomllib
from enum import StrEnum
from pathlib import Path
from typing import Annotated, Any, Literal, Self

from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator, model_validator

from oscint.curve import SupportCurve
from oscint.errors import ConfigError, CurveFormatError
from oscint.models import BoundaryKind
from oscint.specfun import MAX_ORDER

logger = logging.getLogger(__name__)

THREADS_ENV = "OSCINT_THREADS"
DEFAULT_SEED = 42
MAX_GRID_POINTS = 10_000


class Subcommand(StrEnum):
    LEIBNIZ = "leibniz"
    PHASE = "phase"
    PLANEWAVE = "planewave"
    ALPHA_STAR = "alpha-star"
    EIGEN = "eigen"
    GEOMETRY = "geometry"
    RIGIDITY = "rigidity"
    SELFTEST = "selftest"


class ReportFormat(StrEnum):
    CSV = "csv"
    JSON = "json"


CURVE_SUBCOMMANDS = frozenset(
    {
        Subcommand.PHASE,
        Subcommand.PLANEWAVE,
        Subcommand.ALPHA_STAR,
        Subcommand.EIGEN,
        Subcommand.GEOMETRY,
        Subcommand.RIGIDITY,
    }
)


# -- curves -------------------------------------------------------------------


class _Strict(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")


class SupportFourierSpec(_Strict):
    type: Literal["support_fourier"]
    a0: float
    cos: list[float] = Field(default_factory=list)
    sin: list[float] = Field(default_factory=list)

    def to_curve(self) -> SupportCurve:
        return SupportCurve.fourier(self.a0, self.cos, self.sin)


class EllipseSpec(_Strict):
    type: Literal["ellipse"]
    a: float = Field(gt=0)
    b: float = Field(gt=0)
    rotation: float = 0.0

    def to_curve(self) -> SupportCurve:
        return SupportCurve.ellipse(self.a, self.b, self.rotation)


class CurveFile(BaseModel):
    curve: Annotated[SupportFourierSpec | EllipseSpec, Field(discriminator="type")]


def parse_curve(data: Any) -> SupportCurve:
    """Build a curve from the decoded JSON object of a curve file."""
    try:
        spec = CurveFile.model_validate({"curve": data}).curve
    except ValidationError as e:
        msg = f"invalid curve description: {e.errors()[0]['msg']}"
        raise CurveFormatError(msg) from e
    return spec.to_curve()


def load_curve(ref: str | Path) -> SupportCurve:
    """Resolve a registry name (``disk``, ``reuleaux3``, ...) or a JSON curve file."""
    from oscint.curves.definitions import get_reference_curve

    reference = get_reference_curve(str(ref))
    if reference is not None:
        return reference.curve
    path = Path(ref)
    if not path.is_file():
        msg = f"'{ref}' is neither a curve file nor a registered curve name"
        raise CurveFormatError(msg)
    try:
        data = json.loads(path.read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as e:
        msg = f"cannot read curve file {path}: {e}"
        raise CurveFormatError(msg) from e
    logger.debug("loaded curve file %s", path)
    return parse_curve(data)


def curve_ref_exists(ref: str | Path) -> bool:
    from oscint.curves.definitions import get_reference_curve

    return get_reference_curve(str(ref)) is not None or Path(ref).is_file()


# -- grids --------------------------------------------------------------------


def parse_lambda_grid(text: str) -> list[float]:
    """``A:B:*r`` (geometric), ``A:B:+d`` (arithmetic) or ``v1,v2,...``."""
    text = text.strip()
    try:
        if ":" not in text:
            values = [float(part) for part in text.split(",") if part.strip()]
        else:
            start_s, stop_s, step_s = text.split(":")
            start, stop = float(start_s), float(stop_s)
            op, step = step_s[0], float(step_s[1:])
            values = _progression(start, stop, op, step)
    except (ValueError, IndexError) as e:
        msg = f"cannot parse grid '{text}' ({e}); expected A:B:*r, A:B:+d or a comma list"
        raise ConfigError(msg) from e
    if not values:
        msg = f"grid '{text}' is empty"
        raise ConfigError(msg)
    if any(not math.isfinite(v) or v <= 0 for v in values):
        msg = f"grid '{text}' must contain positive finite values only"
        raise ConfigError(msg)
    return values


def _progression(start: float, stop: float, op: str, step: float) -> list[float]:
    if stop < start:
        msg = f"grid end {stop} precedes its start {start}"
        raise ValueError(msg)
    slack = 1e-12 * max(abs(stop), 1.0)
    values = []
    if op == "*":
        if step <= 1:
            msg = f"geometric ratio must exceed 1, got {step}"
            raise ValueError(msg)
        k = 0
        while (v := start * step**k) <= stop + slack and k < MAX_GRID_POINTS:
            values.append(v)
            k += 1
    elif op == "+":
        if step <= 0:
            msg = f"arithmetic step must be positive, got {step}"
            raise ValueError(msg)
        k = 0
        while (v := start + k * step) <= stop + slack and k < MAX_GRID_POINTS:
            values.append(v)
            k += 1
    else:
        msg = f"unknown grid operator '{op}'"
        raise ValueError(msg)
    return values


def parse_window(text: str) -> tuple[float, float]:
    """``A:B`` with 0 < A < B."""
    try:
        lo_s, hi_s = text.split(":")
        lo, hi = float(lo_s), float(hi_s)
    except ValueError as e:
        msg = f"cannot parse window '{text}': expected A:B"
        raise ConfigError(msg) from e
    if not 0 < lo < hi:
        msg = f"window must satisfy 0 < A < B, got {lo}:{hi}"
        raise ConfigError(msg)
    return lo, hi


# -- eigen scans ----------------------------------------------------------------


class EigenScanConfig(_Strict):
    """Scan window, basis size and tolerances of the particular-solutions eigensolver.

    `boundary_points` and `interior_points` default to 4·M and 2·M.
    """

    alpha_min: float = Field(gt=0)
    alpha_max: float
    scan_step: float = Field(default=0.05, gt=0)
    basis_order: int = Field(default=25, ge=1, lt=MAX_ORDER)
    boundary_points: int
    interior_points: int
    refine_tol: float = Field(default=1e-9, gt=0)
    accept_tol: float = Field(default=1e-6, gt=0)
    multiplicity_tol: float = Field(default=1e-4, gt=0)
    qr_rtol: float = Field(default=1e-10, gt=0)
    seed: int = Field(default=DEFAULT_SEED, ge=0)

    @model_validator(mode="before")
    @classmethod
    def _derive_counts(cls, data: Any) -> Any:
        if isinstance(data, dict):
            data = dict(data)
            order = data.get("basis_order") or 25
            if data.get("boundary_points") is None:
                data["boundary_points"] = 4 * order
            if data.get("interior_points") is None:
                data["interior_points"] = 2 * order
        return data

    @model_validator(mode="after")
    def _check_sizes(self) -> Self:
        if self.alpha_max <= self.alpha_min:
            msg = f"alpha_max must exceed alpha_min, got [{self.alpha_min}, {self.alpha_max}]"
            raise ValueError(msg)
        if not self.basis_order < self.boundary_points / 2:
            msg = (
                f"basis order {self.basis_order} needs more than "
                f"{2 * self.basis_order} boundary points"
            )
            raise ValueError(msg)
        if self.interior_points < self.basis_order:
            msg = f"need at least {self.basis_order} interior points, got {self.interior_points}"
            raise ValueError(msg)
        if self.scan_step > self.alpha_max - self.alpha_min:
            msg = f"scan step {self.scan_step} is wider than the window"
            raise ValueError(msg)
        return self

    @property
    def window(self) -> tuple[float, float]:
        return (self.alpha_min, self.alpha_max)

    def with_window(self, alpha_min: float, alpha_max: float) -> EigenScanConfig:
        return EigenScanConfig.model_validate(
            {**self.model_dump(), "alpha_min": alpha_min, "alpha_max": alpha_max}
        )


# -- subcommand options ----------------------------------------------------------


def _split_floats(value: Any) -> Any:
    if isinstance(value, str):
        return [float(part) for part in value.split(",") if part.strip()]
    if isinstance(value, int | float):
        return [value]
    return value


class LeibnizOptions(_Strict):
    nmax: int = Field(default=8, ge=1, le=40)
    check: bool = False
    pairs: int = Field(default=50, ge=1)


class PhaseOptions(_Strict):
    direction: float = 0.0
    t: float = Field(default=0.0, ge=0)
    lambda_grid: str = "100:6400:*2"
    literal_signs: bool = False
    allow_inadmissible: bool = False

    @field_validator("lambda_grid")
    @classmethod
    def _valid_grid(cls, value: str) -> str:
        lams = parse_lambda_grid(value)
        if len(lams) < 4:
            msg = f"a slope fit needs at least 4 λ values, got {len(lams)}"
            raise ValueError(msg)
        return value

    @property
    def lambdas(self) -> list[float]:
        return parse_lambda_grid(self.lambda_grid)


class PlaneWaveOptions(_Strict):
    kind: BoundaryKind = BoundaryKind.DIRICHLET
    alpha: float
    t: list[float] = Field(default_factory=lambda: [1.0])
    dirs: int = Field(default=32, ge=1)
    direction: float = 0.0
    tol: float | None = Field(default=None, gt=0)
    allow_inadmissible: bool = False
    literal_signs: bool = False

    @field_validator("t", mode="before")
    @classmethod
    def _split_t(cls, value: Any) -> Any:
        return _split_floats(value)

    @model_validator(mode="after")
    def _check_levels(self) -> Self:
        if not self.t:
            msg = "at least one t value is required"
            raise ValueError(msg)
        for t in self.t:
            if t < 0 or self.alpha + t * t <= 0:
                msg = f"t={t} gives no real λ on the level set α={self.alpha}"
                raise ValueError(msg)
        return self


class AlphaStarOptions(_Strict):
    direction: float = 0.0
    m_sum: float = Field(default=1.0, gt=0)
    c_star: float = Field(default=1.0, ge=1)
    eps: float = Field(default=0.01, ge=0)


class EigenOptions(_Strict):
    kind: BoundaryKind = BoundaryKind.DIRICHLET
    alpha_window: str = "5:7"
    dev_tol: float = Field(default=1e-4, gt=0)
    scan_step: float | None = None
    basis_order: int | None = None
    refine_tol: float | None = None

    @field_validator("alpha_window")
    @classmethod
    def _valid_window(cls, value: str) -> str:
        parse_window(value)
        return value

    def scan_config(self, seed: int) -> EigenScanConfig:
        lo, hi = parse_window(self.alpha_window)
        overrides = {
            "scan_step": self.scan_step,
            "basis_order": self.basis_order,
            "refine_tol": self.refine_tol,
        }
        return EigenScanConfig.model_validate(
            {
                "alpha_min": lo,
                "alpha_max": hi,
                "seed": seed,
                **{k: v for k, v in overrides.items() if v is not None},
            }
        )


class GeometryOptions(_Strict):
    tol: float = Field(default=1e-10, gt=0)
    samples: int = Field(default=256, ge=16)


class RigidityOptions(_Strict):
    kind: BoundaryKind = BoundaryKind.DIRICHLET
    alpha: float = Field(gt=0)
    t: list[float] = Field(default_factory=lambda: [1.0])
    dirs: int = Field(default=16, ge=1)
    dev_tol: float = Field(default=1e-4, gt=0)
    half_width: float = Field(default=0.5, gt=0)

    @field_validator("t", mode="before")
    @classmethod
    def _split_t(cls, value: Any) -> Any:
        return _split_floats(value)


class SelftestOptions(_Strict):
    nmax: int = Field(default=6, ge=1, le=8)
    pairs: int = Field(default=5, ge=1)


OPTIONS_MODELS: dict[Subcommand, type[BaseModel]] = {
    Subcommand.LEIBNIZ: LeibnizOptions,
    Subcommand.PHASE: PhaseOptions,
    Subcommand.PLANEWAVE: PlaneWaveOptions,
    Subcommand.ALPHA_STAR: AlphaStarOptions,
    Subcommand.EIGEN: EigenOptions,
    Subcommand.GEOMETRY: GeometryOptions,
    Subcommand.RIGIDITY: RigidityOptions,
    Subcommand.SELFTEST: SelftestOptions,
}


class RunConfig(_Strict):
    """One fully resolved invocation: the subcommand, its inputs and its output."""

    subcommand: Subcommand
    curve: str | None = None
    output: Path | None = None
    format: ReportFormat = ReportFormat.CSV
    seed: int = Field(default=DEFAULT_SEED, ge=0)
    threads: int = Field(default=1, ge=1)
    verbose: bool = False
    options: dict[str, Any] = Field(default_factory=dict)

    @model_validator(mode="after")
    def _check_inputs(self) -> Self:
        if self.subcommand in CURVE_SUBCOMMANDS:
            if self.curve is None:
                msg = f"'{self.subcommand}' needs a curve"
                raise ValueError(msg)
            if not curve_ref_exists(self.curve):
                msg = f"'{self.curve}' is neither a curve file nor a registered curve name"
                raise ValueError(msg)
        OPTIONS_MODELS[self.subcommand].model_validate(self.options)
        return self

    def parsed_options(self) -> Any:
        return OPTIONS_MODELS[self.subcommand].model_validate(self.options)


# -- files, flags and environment ---------------------------------------------------


def load_config_file(path: Path) -> dict[str, Any]:
    """Read a JSON or TOML config file into a mapping of subcommand tables."""
    try:
        if path.suffix.lower() == ".toml":
            with path.open("rb") as fh:
                data = tomllib.load(fh)
        else:
            data = json.loads(path.read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError, tomllib.TOMLDecodeError) as e:
        msg = f"cannot read config file {path}: {e}"
        raise ConfigError(msg) from e
    if not isinstance(data, dict):
        msg = f"config file {path} must hold a table of subcommand sections"
        raise ConfigError(msg)
    unknown = set(data) - {s.value for s in Subcommand} - {"global"}
    if unknown:
        msg = f"config file {path} has unknown sections: {', '.join(sorted(unknown))}"
        raise ConfigError(msg)
    return data


def merge_options(file_table: dict[str, Any] | None, flags: dict[str, Any]) -> dict[str, Any]:
    """Overlay explicitly given flags on the file table; unset flags are None and never override."""
    merged = dict(file_table or {})
    merged.update({key: value for key, value in flags.items() if value is not None})
    return merged


def resolve_threads(flag: int | None = None) -> int:
    """Thread cap from the flag, else $OSCINT_THREADS, else 1."""
    if flag is not None:
        if flag < 1:
            msg = f"thread count must be at least 1, got {flag}"
            raise ConfigError(msg)
        return flag
    raw = os.environ.get(THREADS_ENV)
    if raw is None or not raw.strip():
        return 1
    try:
        threads = int(raw)
    except ValueError:
        msg = f"{THREADS_ENV} must be a positive integer, got '{raw}'"
        raise ConfigError(msg) from None
    if threads < 1:
        msg = f"{THREADS_ENV} must be a positive integer, got '{raw}'"
        raise ConfigError(msg)
    return threads


def validation_message(error: ValidationError) -> str:
    """First validation problem, phrased for the diagnostic stream."""
    first = error.errors()[0]
    where = ".".join(str(part) for part in first.get("loc", ()))
    text = str(first.get("msg", error))
    return f"{where}: {text}" if where else text

