"""Figure rendering for compclass sweep CSVs."""

from .figures import EXPECTED_COLUMNS, FigureSpec, RenderResult, SchemaError, render

__version__ = "0.1.0"
