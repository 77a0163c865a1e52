"""Script entry point: render one figure from CLI-produced CSVs."""
from __future__ import annotations

import sys

import click

from .render import DEFAULT_LEVELS, InputError, PlotSpec, render


@click.command()
@click.option("--input", "inputs", multiple=True, required=True,
              help="input CSV path (repeatable)")
@click.option("--kind", type=click.Choice(["contour", "decay"]), required=True)
@click.option("--levels", default=None,
              help='comma-separated contour levels; "" for axes only')
@click.option("--out", required=True, help="output image path")
def main(inputs, kind, levels, out):
    """Render pextremal CSV outputs into a static figure."""
    if levels is None:
        level_values = DEFAULT_LEVELS if kind == "contour" else ()
    else:
        try:
            level_values = tuple(float(t) for t in levels.split(",") if t.strip())
        except ValueError:
            click.echo(f"error: cannot parse levels {levels!r}", err=True)
            sys.exit(2)
    try:
        spec = PlotSpec(inputs=tuple(inputs), kind=kind, out=out,
                        levels=level_values)
        render(spec)
    except InputError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(2)
    except OSError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(4)


if __name__ == "__main__":
    main()
