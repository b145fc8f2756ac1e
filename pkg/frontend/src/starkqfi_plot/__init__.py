"""Figure renderer for starkqfi sweep CSVs."""

from .data import MissingColumnError, MissingInputError, load_table
from .figures import RENDERERS, render

__version__ = "0.1.0"
__all__ = ["MissingColumnError", "MissingInputError", "load_table", "RENDERERS", "render"]
