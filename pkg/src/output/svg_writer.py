import io
import math
from typing import Any, Dict, List, Tuple

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

from core.errors import OutputError
from output.base import TableWriter, column_values

FIGSIZE = (8, 6)
GUIDE_ANGLE = -2.0 * math.pi / 3.0
SVG_RC = {"svg.hashsalt": "stark-resonances", "svg.fonttype": "none"}


class SvgWriter(TableWriter):
    """
    Plots two columns of a table as a scatter or line chart.

    meta["plot"] selects the columns: {"x": ..., "y": ..., "kind": "scatter" |
    "line", "group": optional column splitting the points into series,
    "guide": true to draw the half-line arg(eps) = -2 pi/3}. Without it the
    first two columns are scattered. Each series is drawn with gid
    "series-<name>" and the guide with gid "guide".
    """

    extension = ".svg"

    def render(self, columns: List[str], rows: List[List[Any]], meta: Dict[str, Any]) -> str:
        plot = dict(meta.get("plot") or {})
        x_name = plot.get("x", columns[0])
        y_name = plot.get("y", columns[1] if len(columns) > 1 else columns[0])
        kind = plot.get("kind", "scatter")

        xs = [float(v) for v in column_values(columns, rows, x_name)]
        ys = [float(v) for v in column_values(columns, rows, y_name)]
        groups = column_values(columns, rows, plot["group"]) if plot.get("group") else [""] * len(xs)
        series: Dict[str, List[Tuple[float, float]]] = {}
        for g, x, y in zip(groups, xs, ys):
            series.setdefault(str(g), []).append((x, y))
        return self.render_series(series, x_name, y_name, kind, bool(plot.get("guide")), meta.get("title", ""))

    def render_series(self, series: Dict[str, List[Tuple[float, float]]], x_label: str, y_label: str,
                      kind: str = "scatter", guide: bool = False, title: str = "") -> str:
        """
        Draw named point series and return the SVG text.

        Raises:
            OutputError: Unknown plot kind or no points at all.
        """
        if kind not in ("scatter", "line"):
            raise OutputError(f"unknown plot kind {kind!r}")
        if not any(series.values()):
            raise OutputError("nothing to plot")

        with plt.rc_context(SVG_RC):
            fig, ax = plt.subplots(figsize=FIGSIZE)
            try:
                style = "-" if kind == "line" else "o"
                for name in sorted(series):
                    xs, ys = zip(*series[name]) if series[name] else ((), ())
                    ax.plot(xs, ys, style, mfc="none", lw=1.5, label=name or None, gid=f"series-{name or 'data'}")
                ax.axhline(0.0, color="0.6", lw=0.8, ls=":")
                ax.axvline(0.0, color="0.6", lw=0.8, ls=":")
                if guide:
                    x_lim, y_lim = ax.get_xlim(), ax.get_ylim()
                    r_end = 2.0 * max(abs(v) for v in x_lim + y_lim)
                    ax.plot([0.0, r_end * math.cos(GUIDE_ANGLE)], [0.0, r_end * math.sin(GUIDE_ANGLE)],
                            "--", color="black", lw=1.0, gid="guide")
                    ax.set_xlim(x_lim)
                    ax.set_ylim(y_lim)
                ax.set_xlabel(x_label)
                ax.set_ylabel(y_label)
                if title:
                    ax.set_title(title)
                if any(series):
                    ax.legend(loc="best")
                ax.grid(True, alpha=0.3)
                fig.tight_layout()

                buffer = io.StringIO()
                fig.savefig(buffer, format="svg", metadata={"Date": None})
            finally:
                plt.close(fig)
        return buffer.getvalue()
