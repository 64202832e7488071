"""Minimal self-contained SVG line plots from CSV columns.

No renderer dependencies: the emitted file is a polyline plus one circle
marker per data row, axis frame, and min/max tick labels. Intended for
quick looks at study output, not publication graphics.
"""

import math

from .exceptions import ConfigError, IOFormatError
from .io import read_csv

_W, _H = 640.0, 480.0
_ML, _MR, _MT, _MB = 70.0, 20.0, 20.0, 50.0


def _coord(v):
    return "%.6g" % v


def _column(header, rows, name, path):
    if name not in header:
        raise IOFormatError(f"{path}: column {name!r} not in {header}")
    j = header.index(name)
    out = []
    for i, row in enumerate(rows, start=1):
        try:
            out.append(float(row[j]))
        except ValueError as exc:
            raise IOFormatError(f"{path}: row {i}: column {name!r} value "
                                f"{row[j]!r} is not numeric") from exc
    return out


def _maybe_log(vals, flag, name, path):
    if not flag:
        return vals
    out = []
    for i, v in enumerate(vals, start=1):
        if v <= 0.0:
            raise IOFormatError(f"{path}: row {i}: log scale needs positive "
                                f"{name}, found {v:.17g}")
        out.append(math.log10(v))
    return out


def emit_plot(csv_path, columns, out_path, logx=False, logy=False):
    """Plot columns[1] against columns[0] from a CSV file into a
    standalone SVG. Nothing is written when the input is unusable."""
    if len(columns) != 2:
        raise ConfigError("emit_plot needs exactly two column names (x, y)")
    header, rows = read_csv(csv_path)
    if not rows:
        raise IOFormatError(f"{csv_path}: no data rows to plot")
    xs = _maybe_log(_column(header, rows, columns[0], csv_path), logx, columns[0], csv_path)
    ys = _maybe_log(_column(header, rows, columns[1], csv_path), logy, columns[1], csv_path)

    def scale(vals, lo_px, hi_px):
        vmin, vmax = min(vals), max(vals)
        if vmax == vmin:
            return [0.5 * (lo_px + hi_px) for _ in vals], vmin, vmax
        t = [(v - vmin) / (vmax - vmin) for v in vals]
        return [lo_px + u * (hi_px - lo_px) for u in t], vmin, vmax

    px, xmin, xmax = scale(xs, _ML, _W - _MR)
    py, ymin, ymax = scale(ys, _H - _MB, _MT)

    def label(v, flag):
        return "%.6g" % (10.0**v if flag else v)

    parts = []
    parts.append('<svg xmlns="http://www.w3.org/2000/svg" width="%d" height="%d" '
                 'viewBox="0 0 %d %d">' % (_W, _H, _W, _H))
    parts.append('<rect x="0" y="0" width="%d" height="%d" fill="white"/>' % (_W, _H))
    parts.append('<rect x="%s" y="%s" width="%s" height="%s" fill="none" '
                 'stroke="black" stroke-width="1"/>'
                 % (_coord(_ML), _coord(_MT), _coord(_W - _ML - _MR), _coord(_H - _MT - _MB)))
    pts = " ".join("%s,%s" % (_coord(a), _coord(b)) for a, b in zip(px, py))
    parts.append('<polyline points="%s" fill="none" stroke="#1f77b4" stroke-width="1.5"/>' % pts)
    for a, b in zip(px, py):
        parts.append('<circle cx="%s" cy="%s" r="3" fill="#1f77b4"/>' % (_coord(a), _coord(b)))
    parts.append('<text x="%s" y="%s" font-size="12" text-anchor="start">%s</text>'
                 % (_coord(_ML), _coord(_H - _MB + 20), label(xmin, logx)))
    parts.append('<text x="%s" y="%s" font-size="12" text-anchor="end">%s</text>'
                 % (_coord(_W - _MR), _coord(_H - _MB + 20), label(xmax, logx)))
    parts.append('<text x="%s" y="%s" font-size="12" text-anchor="end">%s</text>'
                 % (_coord(_ML - 6), _coord(_H - _MB), label(ymin, logy)))
    parts.append('<text x="%s" y="%s" font-size="12" text-anchor="end">%s</text>'
                 % (_coord(_ML - 6), _coord(_MT + 12), label(ymax, logy)))
    parts.append('<text x="%s" y="%s" font-size="12" text-anchor="middle">%s</text>'
                 % (_coord((_ML + _W - _MR) / 2), _coord(_H - 12), columns[0]))
    parts.append('<text x="14" y="%s" font-size="12" text-anchor="middle" '
                 'transform="rotate(-90 14 %s)">%s</text>'
                 % (_coord((_MT + _H - _MB) / 2), _coord((_MT + _H - _MB) / 2), columns[1]))
    parts.append("</svg>")
    body = "\n".join(parts) + "\n"
    try:
        with open(out_path, "w", encoding="utf-8") as fh:
            fh.write(body)
    except OSError as exc:
        raise IOFormatError(f"cannot write {out_path}: {exc}") from exc
