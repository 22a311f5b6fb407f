from .figures import (
    FigureSpec,
    NoDataError,
    PlotError,
    SchemaError,
    build_figure,
    read_results,
    render_figure,
)

__all__ = [
    "FigureSpec",
    "NoDataError",
    "PlotError",
    "SchemaError",
    "build_figure",
    "read_results",
    "render_figure",
]
