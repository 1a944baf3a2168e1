"""
docvision CLI entry point.

Commands map one-to-one onto library workflows: tile planning, tile
preprocessing, forward traces, mixture manifests, schedule validation and
evaluation.
"""

import sys
from typing import Annotated

import click
import typer

from docvision_cli._cli_utils import err_console, setup_logging
from docvision_cli.commands import eval as eval_cmd
from docvision_cli.commands import forward, mixture, plan, preprocess, report, schedule

# Create the main CLI app
app = typer.Typer(
    name="docvision",
    help="docvision - dynamic-resolution tiling, desk-scale forward traces, training-recipe manifests and document-extraction evaluation",
    no_args_is_help=True,
    add_completion=False,
)


@app.callback()
def _root(
    verbose: Annotated[bool, typer.Option("--verbose", "-v", help="Log progress to stderr")] = False,
) -> None:
    setup_logging(verbose)


# Register commands
app.command(name="plan", help="Plan the tile grid for an image")(plan.plan)
app.command(name="preprocess", help="Cut an image into tiles and write them with a plan sidecar")(preprocess.preprocess)
app.command(name="forward", help="Run the desk-scale forward path and write a shape trace")(forward.forward)
app.command(name="mixture", help="Compose a shuffled manifest from a data mixture")(mixture.mixture)
app.command(name="schedule", help="Validate stage schedules against their freeze patterns")(schedule.schedule)
app.command(name="eval", help="Evaluate model answers on an eval set")(eval_cmd.eval_)
app.command(name="report", help="Re-aggregate an existing per-sample results file")(report.report)


def _fail(kind: str, message: str, code: int) -> None:
    # one line on stderr, whatever the exception text looks like
    message = " ".join(message.split())
    err_console.print(f"error: {kind}: {message}", markup=False)
    sys.exit(code)


# Entry point for setuptools
def main() -> None:
    """Main entry point for the CLI."""
    try:
        code = app(standalone_mode=False)
    except KeyboardInterrupt:
        print("\nOperation cancelled by user.")
        sys.exit(130)
    except click.exceptions.Abort:
        print("\nOperation cancelled by user.")
        sys.exit(130)
    except click.UsageError as e:
        _fail("usage", e.format_message(), 2)
    except Exception as e:
        _fail(type(e).__name__, str(e), 1)
    else:
        if isinstance(code, int) and code:
            sys.exit(code)


if __name__ == "__main__":
    main()
