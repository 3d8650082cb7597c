"""Command-line front end: solve a configured problem or serve the API."""

from __future__ import annotations

import sys
from pathlib import Path

import click

from . import __version__
from .errors import ConfigError, MellinFdeError
from .service import parse_config, run, validate_config_mapping

EXIT_CONFIG = 2
EXIT_VALIDATION = 3
EXIT_NUMERIC = 4


@click.group()
@click.version_option(version=__version__)
def main() -> None:
    """Mellin-transform solver for multi-order fractional differential
    equations with quiescent initial conditions."""


@main.command()
@click.argument("config_path", type=click.Path(exists=True, dir_okay=False,
                                               path_type=Path))
@click.option("--out", "out_dir", type=click.Path(file_okay=False, path_type=Path),
              default=Path("."), show_default=True,
              help="Directory for the solution table and metadata record.")
@click.option("--rho", type=float, default=None,
              help="Override the sampling line's real part.")
@click.option("--delta-eta", type=float, default=None,
              help="Override the imaginary-axis sampling step.")
@click.option("--eta-bar", type=float, default=None,
              help="Override the imaginary-axis cutoff.")
@click.option("--no-oracle", is_flag=True,
              help="Skip all reference-oracle columns.")
@click.option("--spectrum", is_flag=True,
              help="Also write the solved spectrum (k, gamma, X) table.")
def solve(config_path: Path, out_dir: Path, rho, delta_eta, eta_bar,
          no_oracle: bool, spectrum: bool) -> None:
    """Solve the problem described by CONFIG_PATH."""
    try:
        config = parse_config(config_path.read_text())
        overrides = {}
        if rho is not None:
            overrides["rho"] = rho
        if delta_eta is not None:
            overrides["delta_eta"] = delta_eta
        if eta_bar is not None:
            overrides["eta_bar"] = eta_bar
        if overrides:
            # route through the validated model so flag combinations obey
            # the same invariants as config files
            grid = config.grid.model_dump()
            grid.update(overrides)
            payload = config.model_dump(by_alias=True)
            payload["grid"] = grid
            config = validate_config_mapping(payload)
        if no_oracle:
            config = config.model_copy(update={"oracles": []})
    except ConfigError as exc:
        click.echo(f"configuration error: {exc}", err=True)
        sys.exit(EXIT_CONFIG)

    try:
        result = run(config, out_dir, spectrum=spectrum)
    except ConfigError as exc:
        click.echo(f"configuration error: {exc}", err=True)
        sys.exit(EXIT_CONFIG)
    except MellinFdeError as exc:
        # run() converts expected failures to exit codes; anything that
        # still escapes is a numeric-class failure
        click.echo(f"numeric error: {exc}", err=True)
        sys.exit(EXIT_NUMERIC)

    for diag in result.diagnostics:
        click.echo(f"{diag.severity}: [{diag.code}] {diag.message}", err=True)
    if result.exit_code == 0:
        click.echo(f"wrote {result.table_path}")
        click.echo(f"wrote {result.metadata_path}")
        if result.spectrum_path is not None:
            click.echo(f"wrote {result.spectrum_path}")
    else:
        click.echo(f"run failed: {result.message}", err=True)
        if result.metadata_path is not None:
            click.echo(f"wrote {result.metadata_path}", err=True)
    sys.exit(result.exit_code)


@main.command()
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", default=8000, show_default=True, type=int)
def serve(host: str, port: int) -> None:
    """Run the HTTP service (requires the 'serve' extra)."""
    try:
        import uvicorn
    except ImportError:
        click.echo("the 'serve' extra is not installed (pip install mellinfde[serve])",
                   err=True)
        sys.exit(EXIT_CONFIG)
    from .api import app

    uvicorn.run(app, host=host, port=port)


if __name__ == "__main__":
    main()
