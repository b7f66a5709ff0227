"""Allow running as `python -m oscint`."""

from oscint.cli import app

app()
