"""`python -m cer` dispatches to the CLI."""

from .cli import entrypoint

entrypoint()
