"""Plain-text file formats: point clouds, tensors, boundary layouts,
grid functions, radial samples, fitted models, and CSV tables.

All numeric output uses 17 significant digits so round-trips are exact
for doubles and reruns are byte-identical. Lines starting with # are
comments in every input format.
"""

import numpy as np

from .exceptions import ConfigError, IOFormatError
from .series import DfwModel, NodeSet, RationalDfwModel, ScaleSet, SCALE_KINDS
from .transforms import GridFunction, RadialSamples

FMT = "%.17g"

MODEL_MAGIC = "dfwave-model 1"
RATIONAL_MAGIC = "dfwave-rational-model 1"


def _fmt(x):
    return FMT % float(x)


def _fmt_row(row):
    return " ".join(_fmt(v) for v in np.atleast_1d(row))


def _data_lines(path):
    try:
        with open(path, "r", encoding="utf-8") as fh:
            raw = fh.readlines()
    except OSError as exc:
        raise IOFormatError(f"cannot read {path}: {exc}") from exc
    out = []
    for ln, line in enumerate(raw, start=1):
        body = line.strip()
        if body and not body.startswith("#"):
            out.append((ln, body))
    return out


def _parse_floats(path, ln, body, expected=None):
    try:
        vals = [float(tok) for tok in body.split()]
    except ValueError as exc:
        raise IOFormatError(f"{path}:{ln}: not numeric: {body!r}") from exc
    if expected is not None and len(vals) != expected:
        raise IOFormatError(f"{path}:{ln}: expected {expected} values, found {len(vals)}")
    return vals


def read_points(path):
    """Point cloud: one point per line, whitespace-separated columns."""
    lines = _data_lines(path)
    if not lines:
        raise IOFormatError(f"{path}: no data lines")
    width = len(lines[0][1].split())
    rows = [_parse_floats(path, ln, body, expected=width) for ln, body in lines]
    return np.asarray(rows, dtype=float)


def write_points(path, points):
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    with open(path, "w", encoding="utf-8") as fh:
        for row in pts:
            fh.write(_fmt_row(row) + "\n")


def read_tensor(path):
    """Square matrix, one row per line."""
    arr = read_points(path)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
        raise IOFormatError(f"{path}: expected a square matrix, got shape {arr.shape}")
    return arr


def read_boundary(path):
    """Boundary layout: 2n columns per line, point then unit normal."""
    arr = read_points(path)
    if arr.shape[1] % 2 != 0:
        raise IOFormatError(f"{path}: boundary rows need 2n columns (point, normal)")
    n = arr.shape[1] // 2
    return arr[:, :n], arr[:, n:]


def write_boundary(path, points, normals):
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    nor = np.atleast_2d(np.asarray(normals, dtype=float))
    if pts.shape != nor.shape:
        raise ConfigError("points and normals must have matching shapes")
    with open(path, "w", encoding="utf-8") as fh:
        for p, q in zip(pts, nor):
            fh.write(_fmt_row(p) + " " + _fmt_row(q) + "\n")


def read_grid(path):
    """Grid function: header `dims shape... period...`, then values in
    row-major order (any line wrapping)."""
    lines = _data_lines(path)
    if not lines:
        raise IOFormatError(f"{path}: empty grid file")
    ln, head = lines[0]
    toks = head.split()
    try:
        dims = int(toks[0])
    except (ValueError, IndexError) as exc:
        raise IOFormatError(f"{path}:{ln}: bad grid header") from exc
    if len(toks) != 1 + 2 * dims:
        raise IOFormatError(f"{path}:{ln}: header needs dims, {dims} shape and "
                            f"{dims} period entries")
    try:
        shape = tuple(int(t) for t in toks[1 : 1 + dims])
        period = [float(t) for t in toks[1 + dims :]]
    except ValueError as exc:
        raise IOFormatError(f"{path}:{ln}: bad grid header") from exc
    vals = []
    for ln2, body in lines[1:]:
        vals.extend(_parse_floats(path, ln2, body))
    total = int(np.prod(shape))
    if len(vals) != total:
        raise IOFormatError(f"{path}: expected {total} values, found {len(vals)}")
    try:
        return GridFunction(np.asarray(vals, dtype=float).reshape(shape), np.asarray(period))
    except ConfigError as exc:
        raise IOFormatError(f"{path}: {exc}") from exc


def write_grid(path, gf):
    if not isinstance(gf, GridFunction):
        raise ConfigError("write_grid expects a GridFunction")
    with open(path, "w", encoding="utf-8") as fh:
        head = [str(gf.dims)] + [str(s) for s in gf.shape] + [_fmt(p) for p in gf.period]
        fh.write(" ".join(head) + "\n")
        flat = gf.values.ravel()
        for i in range(0, flat.size, 8):
            fh.write(_fmt_row(flat[i : i + 8]) + "\n")


def read_radial(path):
    """Radial samples: two columns, abscissa then value."""
    arr = read_points(path)
    if arr.shape[1] != 2:
        raise IOFormatError(f"{path}: radial samples need exactly two columns")
    try:
        return RadialSamples(arr[:, 0], arr[:, 1])
    except ConfigError as exc:
        raise IOFormatError(f"{path}: {exc}") from exc


def write_radial(path, rs):
    with open(path, "w", encoding="utf-8") as fh:
        for x, v in zip(rs.abscissae, rs.values):
            fh.write(_fmt(x) + " " + _fmt(v) + "\n")


def _write_model_body(fh, model):
    if model.f0 is not None:
        raise IOFormatError("models with an attached base function cannot be serialized")
    fh.write(f"family {model.family}\n")
    fh.write(f"kernel_n {model.kernel_n}\n")
    fh.write(f"scale_kind {model.scales.kind}\n")
    fh.write("scales " + _fmt_row(model.scales.values) + "\n")
    fh.write("a0 " + _fmt(model.a0) + "\n")
    fh.write(f"nodes {model.nodes.M} {model.nodes.dim}\n")
    for row in model.nodes.points:
        fh.write(_fmt_row(row) + "\n")
    fh.write(f"coeffs {model.coeffs.shape[0]} {model.coeffs.shape[1]}\n")
    for row in model.coeffs:
        fh.write(_fmt_row(row) + "\n")


class _LineReader:
    def __init__(self, path):
        self.path = path
        self.lines = _data_lines(path)
        self.pos = 0

    def next(self, what):
        if self.pos >= len(self.lines):
            raise IOFormatError(f"{self.path}: unexpected end of file, wanted {what}")
        ln, body = self.lines[self.pos]
        self.pos += 1
        return ln, body

    def keyword(self, key):
        ln, body = self.next(key)
        toks = body.split()
        if toks[0] != key:
            raise IOFormatError(f"{self.path}:{ln}: expected {key!r}, found {toks[0]!r}")
        return ln, toks[1:]


def _read_model_body(rd):
    _, fam = rd.keyword("family")
    if len(fam) != 1:
        raise IOFormatError(f"{rd.path}: malformed family line")
    _, kn = rd.keyword("kernel_n")
    _, kind = rd.keyword("scale_kind")
    if len(kind) != 1 or kind[0] not in SCALE_KINDS:
        raise IOFormatError(f"{rd.path}: unknown scale kind {kind!r}")
    ln, sv = rd.keyword("scales")
    scales = ScaleSet(kind[0], _parse_floats(rd.path, ln, " ".join(sv)))
    ln, a0 = rd.keyword("a0")
    a0 = _parse_floats(rd.path, ln, " ".join(a0), expected=1)[0]
    ln, nd = rd.keyword("nodes")
    try:
        M, dim = int(nd[0]), int(nd[1])
    except (ValueError, IndexError) as exc:
        raise IOFormatError(f"{rd.path}:{ln}: bad nodes header") from exc
    pts = np.empty((M, dim))
    for i in range(M):
        ln2, body = rd.next("node row")
        pts[i] = _parse_floats(rd.path, ln2, body, expected=dim)
    ln, ch = rd.keyword("coeffs")
    try:
        N, M2 = int(ch[0]), int(ch[1])
    except (ValueError, IndexError) as exc:
        raise IOFormatError(f"{rd.path}:{ln}: bad coeffs header") from exc
    if M2 != M:
        raise IOFormatError(f"{rd.path}: coefficient width {M2} != node count {M}")
    coeffs = np.empty((N, M))
    for i in range(N):
        ln2, body = rd.next("coefficient row")
        coeffs[i] = _parse_floats(rd.path, ln2, body, expected=M)
    try:
        return DfwModel(scales=scales, nodes=NodeSet(pts), coeffs=coeffs, a0=a0,
                        family=fam[0], kernel_n=int(kn[0]))
    except ConfigError as exc:
        raise IOFormatError(f"{rd.path}: {exc}") from exc


def write_model(path, model):
    """Serialize a fitted model (or rational pair) to versioned text."""
    with open(path, "w", encoding="utf-8") as fh:
        if isinstance(model, RationalDfwModel):
            fh.write(RATIONAL_MAGIC + "\n")
            fh.write("numerator\n")
            _write_model_body(fh, model.numerator)
            fh.write("denominator\n")
            _write_model_body(fh, model.denominator)
            fh.write("pole_risk " + _fmt(model.pole_risk) + "\n")
        elif isinstance(model, DfwModel):
            fh.write(MODEL_MAGIC + "\n")
            _write_model_body(fh, model)
        else:
            raise ConfigError("write_model expects a DfwModel or RationalDfwModel")


def read_model(path):
    rd = _LineReader(path)
    ln, magic = rd.next("format header")
    if magic == MODEL_MAGIC:
        return _read_model_body(rd)
    if magic == RATIONAL_MAGIC:
        ln, tag = rd.next("numerator marker")
        if tag != "numerator":
            raise IOFormatError(f"{path}:{ln}: expected numerator block")
        num = _read_model_body(rd)
        ln, tag = rd.next("denominator marker")
        if tag != "denominator":
            raise IOFormatError(f"{path}:{ln}: expected denominator block")
        den = _read_model_body(rd)
        ln, pr = rd.keyword("pole_risk")
        risk = _parse_floats(path, ln, " ".join(pr), expected=1)[0]
        try:
            return RationalDfwModel(numerator=num, denominator=den, pole_risk=risk)
        except ConfigError as exc:
            raise IOFormatError(f"{path}: {exc}") from exc
    raise IOFormatError(f"{path}:{ln}: unrecognized format header {magic!r}")


def write_csv(path, columns, rows, comments=()):
    """CSV with leading # comment lines, a header row, and 17-digit
    numeric formatting; non-numeric cells pass through as strings."""
    try:
        with open(path, "w", encoding="utf-8") as fh:
            for c in comments:
                fh.write("# " + str(c) + "\n")
            fh.write(",".join(columns) + "\n")
            for row in rows:
                cells = []
                for v in row:
                    if isinstance(v, str):
                        cells.append(v)
                    elif isinstance(v, (bool, np.bool_)):
                        cells.append("1" if v else "0")
                    elif isinstance(v, (int, np.integer)):
                        cells.append(str(int(v)))
                    else:
                        cells.append(_fmt(v))
                fh.write(",".join(cells) + "\n")
    except OSError as exc:
        raise IOFormatError(f"cannot write {path}: {exc}") from exc


def read_csv(path):
    """Returns (columns, rows as list of string lists); # lines skipped."""
    lines = _data_lines(path)
    if not lines:
        raise IOFormatError(f"{path}: empty CSV")
    header = [c.strip() for c in lines[0][1].split(",")]
    rows = []
    for ln, body in lines[1:]:
        cells = [c.strip() for c in body.split(",")]
        if len(cells) != len(header):
            raise IOFormatError(f"{path}:{ln}: expected {len(header)} cells, found {len(cells)}")
        rows.append(cells)
    return header, rows
