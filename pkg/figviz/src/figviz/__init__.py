"""Figure rendering for the allpay CSV datasets."""

from .render import PanelSpec, SchemaError, SeriesSpec, build_spec, load_rows, render

__version__ = "0.1.0"
