"""Figure generation for planner benchmark outputs.

Consumes only the planner's documented external formats: `trace.csv`
cost traces, `plan gain` CSV tables, and `plan dump` graph text.
"""

from .figures import (
    AlgoCurve,
    CostTraceResult,
    GainResult,
    GraphResult,
    plot_cost_trace,
    plot_gain,
    plot_graph,
)
from .io import (
    GainRow,
    GraphDump,
    InputFormatError,
    TraceRow,
    read_dump,
    read_gain,
    read_trace,
)

__version__ = "0.1.0"

__all__ = [
    "AlgoCurve",
    "CostTraceResult",
    "GainResult",
    "GainRow",
    "GraphDump",
    "GraphResult",
    "InputFormatError",
    "TraceRow",
    "plot_cost_trace",
    "plot_gain",
    "plot_graph",
    "read_dump",
    "read_gain",
    "read_trace",
    "__version__",
]
