"""docvision CLI commands."""

from docvision_cli.commands import eval, forward, mixture, plan, preprocess, report, schedule

__all__ = ["plan", "preprocess", "forward", "mixture", "schedule", "eval", "report"]
