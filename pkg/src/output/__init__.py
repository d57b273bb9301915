# output
from .lab_data import load_lab_data
from .plots import emit_plot_data
from .rows import filtering_rows, oracle_rows, robertson_rows, uncertainty_rows
from .writer import atomic_write, format_value, provenance_lines, write_results

__all__ = [
    "atomic_write",
    "emit_plot_data",
    "filtering_rows",
    "format_value",
    "load_lab_data",
    "oracle_rows",
    "provenance_lines",
    "robertson_rows",
    "uncertainty_rows",
    "write_results",
]
