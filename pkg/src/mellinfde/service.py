"""Run orchestration: validated configuration in, solution tables out.

This sits between the numerical core and its two front ends (CLI and HTTP
service). A RunConfig describes one problem, grid, output window, and
oracle selection; solve_tables produces the in-memory table plus metadata;
run writes the delimiter-separated table, a key-value metadata record,
and optionally the solved spectrum to a directory.
"""

from __future__ import annotations

import csv
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Literal, Optional

import numpy as np
import yaml
from pydantic import BaseModel, ConfigDict, Field, ValidationError as PydanticValidationError
from pydantic import model_validator

from . import __version__
from .errors import ConfigError, MellinFdeError, ValidationError
from .forcing import make_forcing
from .mellin import MellinGrid, inverse_reconstruct
from .oracle import gl_stepper, ml_solution_for_problem
from .solver import (
    Diagnostic,
    FdeProblem,
    FdeTerm,
    SolverReport,
    solve_fde,
    validate_problem,
)

__all__ = [
    "GL_STEP_DEFAULT",
    "RunConfig",
    "RunResult",
    "TableResult",
    "build_grid",
    "build_problem",
    "emit_spectrum",
    "parse_config",
    "run",
    "solve_tables",
    "validate_config_mapping",
]

# internal step for the Grünwald-Letnikov comparison column; fine enough
# that its first-order bias stays below the pinned solver tolerances
GL_STEP_DEFAULT = 1e-3

ML_ORACLE = "mittag-leffler"
GL_ORACLE = "grunwald-letnikov"


class TermSpec(BaseModel):
    model_config = ConfigDict(extra="forbid", populate_by_name=False)

    lam: float = Field(alias="lambda")
    alpha: float = Field(ge=0.0)


class ForcingSpec(BaseModel):
    model_config = ConfigDict(extra="forbid")

    kind: Literal["sine-pulse", "step-pulse", "monomial-pulse", "sampled"]
    t_max: Optional[float] = None
    params: dict = Field(default_factory=dict)


class GridSpec(BaseModel):
    model_config = ConfigDict(extra="forbid")

    rho: float = 0.5
    delta_eta: float = Field(default=0.5, gt=0.0)
    eta_bar: float = Field(default=200.0, gt=0.0)

    @model_validator(mode="after")
    def _eta_bar_multiple(self) -> "GridSpec":
        ratio = self.eta_bar / self.delta_eta
        if abs(ratio - round(ratio)) > 1e-9 * max(1.0, abs(ratio)) or round(ratio) < 1:
            raise ValueError(
                f"eta_bar = {self.eta_bar:g} must be a positive integer "
                f"multiple of delta_eta = {self.delta_eta:g}"
            )
        return self

    @property
    def m(self) -> int:
        return int(round(self.eta_bar / self.delta_eta))


class OutputSpec(BaseModel):
    model_config = ConfigDict(extra="forbid")

    t_lo: float = Field(default=0.1, gt=0.0)
    t_hi: float = 15.0
    samples: int = Field(default=200, ge=2)

    @model_validator(mode="after")
    def _window_ordered(self) -> "OutputSpec":
        if not self.t_hi > self.t_lo:
            raise ValueError(f"t_hi = {self.t_hi:g} must exceed t_lo = {self.t_lo:g}")
        return self


class RunConfig(BaseModel):
    model_config = ConfigDict(extra="forbid")

    terms: list[TermSpec] = Field(min_length=1)
    forcing: ForcingSpec
    grid: GridSpec = Field(default_factory=GridSpec)
    output: OutputSpec = Field(default_factory=OutputSpec)
    oracles: list[Literal["mittag-leffler", "grunwald-letnikov"]] = Field(
        default_factory=list
    )
    emit: Literal["csv", "tsv"] = "csv"


def validate_config_mapping(payload: dict) -> RunConfig:
    """Validate an already-decoded configuration mapping.

    Unknown keys are fatal, and every violated invariant is reported, not
    just the first one hit."""
    try:
        return RunConfig.model_validate(payload)
    except PydanticValidationError as exc:
        lines = []
        for err in exc.errors():
            where = ".".join(str(p) for p in err["loc"]) or "<document>"
            lines.append(f"{where}: {err['msg']}")
        raise ConfigError(
            "invalid configuration:\n  " + "\n  ".join(lines)
        ) from exc


def parse_config(text: str) -> RunConfig:
    """Parse and validate a YAML configuration document."""
    try:
        doc = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise ConfigError(f"configuration is not valid YAML: {exc}") from exc
    if doc is None:
        raise ConfigError(
            "configuration is empty; required sections: terms, forcing"
        )
    if not isinstance(doc, dict):
        raise ConfigError("configuration must be a mapping of sections")
    return validate_config_mapping(doc)


def build_problem(config: RunConfig) -> FdeProblem:
    """Materialize the numerical problem from its declarative description."""
    kwargs = dict(config.forcing.params)
    if config.forcing.t_max is not None:
        kwargs["t_max"] = config.forcing.t_max
    try:
        forcing = make_forcing(config.forcing.kind, **kwargs)
        terms = [FdeTerm(t.lam, t.alpha) for t in config.terms]
        return FdeProblem(terms, forcing)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def build_grid(config: RunConfig) -> MellinGrid:
    return MellinGrid(
        rho=config.grid.rho,
        delta_eta=config.grid.delta_eta,
        m=config.grid.m,
    )


@dataclass
class TableResult:
    """Solution table plus run metadata, independent of any file format."""

    columns: list[str]
    rows: list[list]
    metadata: dict
    report: Optional[SolverReport]
    diagnostics: list[Diagnostic]


@dataclass
class RunResult:
    exit_code: int
    table_path: Optional[Path] = None
    metadata_path: Optional[Path] = None
    spectrum_path: Optional[Path] = None
    message: str = ""
    diagnostics: list[Diagnostic] = field(default_factory=list)


def _diag_dicts(diags: list[Diagnostic]) -> list[dict]:
    return [
        {"severity": d.severity, "code": d.code, "message": d.message}
        for d in diags
    ]


def solve_tables(config: RunConfig) -> TableResult:
    """Solve one configured problem and assemble its table in memory.

    Raises ConfigError for unbuildable configurations, ValidationError when
    problem validation produces error diagnostics, and the numeric error
    types from the core on solver/oracle failure."""
    started = time.perf_counter()
    problem = build_problem(config)
    grid = build_grid(config)

    diagnostics = validate_problem(problem, grid)
    metadata = {
        "package_version": __version__,
        "grid": {
            "rho": grid.rho,
            "delta_eta": grid.delta_eta,
            "eta_bar": grid.eta_bar,
            "m": grid.m,
            "b": float(grid.b),
        },
        "output": {
            "t_lo": config.output.t_lo,
            "t_hi": config.output.t_hi,
            "samples": config.output.samples,
        },
        "trusted_window": {
            "t_lo": float(np.exp(-grid.b + 1.0)),
            "t_hi": float(np.exp(grid.b - 1.0)),
        },
        "diagnostics": _diag_dicts(diagnostics),
        "oracles": {},
    }
    if any(d.severity == "error" for d in diagnostics):
        raise ValidationError(
            "; ".join(d.message for d in diagnostics if d.severity == "error")
        )

    report = solve_fde(problem, grid)
    metadata["condition_estimate"] = report.condition_estimate
    metadata["residual_norm"] = report.residual_norm

    times = np.linspace(config.output.t_lo, config.output.t_hi, config.output.samples)
    x_mellin = inverse_reconstruct(report.spectrum, times)

    columns = ["t", "x_mellin"]
    series: dict[str, np.ndarray] = {}

    if ML_ORACLE in config.oracles:
        try:
            ml = ml_solution_for_problem(problem, times)
        except ValueError as exc:
            # closed form does not cover this problem; note it and move on
            note = Diagnostic("warning", "ml-oracle-unavailable", str(exc))
            diagnostics.append(note)
            metadata["diagnostics"] = _diag_dicts(diagnostics)
        else:
            series["x_ml_oracle"] = ml.values
            metadata["oracles"][ML_ORACLE] = {"abs_tol": 1e-6}

    if GL_ORACLE in config.oracles:
        gl = gl_stepper(problem, GL_STEP_DEFAULT, config.output.t_hi)
        series["x_gl_oracle"] = np.interp(times, gl.times, gl.values)
        metadata["oracles"][GL_ORACLE] = {"h": GL_STEP_DEFAULT}

    for name in ("x_ml_oracle", "x_gl_oracle"):
        if name in series:
            columns.append(name)
    if "x_ml_oracle" in series:
        columns.append("abs_err_ml")
    if "x_gl_oracle" in series:
        columns.append("abs_err_gl")
    columns.append("extrapolated")

    lo, hi = metadata["trusted_window"]["t_lo"], metadata["trusted_window"]["t_hi"]
    rows = []
    for i, t in enumerate(times):
        row: list = [float(t), float(x_mellin[i])]
        if "x_ml_oracle" in series:
            row.append(float(series["x_ml_oracle"][i]))
        if "x_gl_oracle" in series:
            row.append(float(series["x_gl_oracle"][i]))
        if "x_ml_oracle" in series:
            row.append(abs(float(x_mellin[i]) - float(series["x_ml_oracle"][i])))
        if "x_gl_oracle" in series:
            row.append(abs(float(x_mellin[i]) - float(series["x_gl_oracle"][i])))
        row.append(not (lo <= t <= hi))
        rows.append(row)

    metadata["wall_time_s"] = round(time.perf_counter() - started, 6)
    return TableResult(columns, rows, metadata, report, diagnostics)


def _format_cell(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    return format(value, ".16e")


def _write_table(result: TableResult, path: Path, emit: str) -> None:
    delim = "\t" if emit == "tsv" else ","
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh, delimiter=delim, lineterminator="\n")
        writer.writerow(result.columns)
        for row in result.rows:
            writer.writerow(_format_cell(v) for v in row)


def emit_spectrum(report: SolverReport, path) -> Path:
    """Write the solved spectrum as k, Re gamma, Im gamma, Re X, Im X rows."""
    path = Path(path)
    grid = report.grid
    line = grid.line()
    values = report.spectrum.values
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["k", "re_gamma", "im_gamma", "re_x", "im_x"])
        for k, g, x in zip(grid.indices(), line, values):
            writer.writerow([
                int(k),
                _format_cell(g.real), _format_cell(g.imag),
                _format_cell(x.real), _format_cell(x.imag),
            ])
    return path


def run(config: RunConfig, out_dir, *, spectrum: bool = False) -> RunResult:
    """Execute one configured run, writing table and metadata files.

    Exit codes: 0 success, 3 validation errors, 4 numeric failure.
    (Configuration problems raise ConfigError before a RunResult exists;
    front ends map those to exit code 2.)"""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    metadata_path = out_dir / "metadata.yaml"

    def write_metadata(payload: dict) -> None:
        with metadata_path.open("w") as fh:
            yaml.safe_dump(payload, fh, sort_keys=True)

    try:
        result = solve_tables(config)
    except ConfigError:
        raise
    except ValidationError as exc:
        problem = build_problem(config)
        diags = validate_problem(problem, build_grid(config))
        write_metadata({
            "package_version": __version__,
            "error": {"class": "validation", "message": str(exc)},
            "diagnostics": _diag_dicts(diags),
        })
        return RunResult(3, metadata_path=metadata_path,
                         message=str(exc), diagnostics=diags)
    except MellinFdeError as exc:
        write_metadata({
            "package_version": __version__,
            "error": {"class": "numeric", "message": str(exc)},
        })
        return RunResult(4, metadata_path=metadata_path, message=str(exc))

    suffix = "tsv" if config.emit == "tsv" else "csv"
    table_path = out_dir / f"solution.{suffix}"
    _write_table(result, table_path, config.emit)
    write_metadata(result.metadata)

    spectrum_path = None
    if spectrum and result.report is not None:
        spectrum_path = emit_spectrum(result.report, out_dir / "spectrum.csv")

    return RunResult(
        0,
        table_path=table_path,
        metadata_path=metadata_path,
        spectrum_path=spectrum_path,
        diagnostics=result.diagnostics,
    )
