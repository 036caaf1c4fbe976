"""Grid evaluation and file export.

A ``FieldGrid`` stores the fields of one transformation level on a uniform
space-time lattice as numpy arrays (complex A, its exact t-derivative, real
B) plus the metadata needed to reproduce it.  Export formats:

* CSV: ``#``-prefixed metadata preamble, header
  ``x,t,re_A,im_A,abs_A,re_At,im_At,B``, one row per sample, row-major with
  t fastest.  Floats are written as shortest round-trip decimals, so files
  are deterministic and parse back bit-exactly.
* JSON: ``{meta, spec, samples}`` with samples as flat per-column arrays.
* SVG: one rectangle per cell under a fixed perceptually ordered ramp;
  grids beyond 500 cells per side are block-averaged down with a warning.

Engine grids fan point evaluations out to a process pool when large; the
``ABROGUE_WORKERS`` environment variable caps (or disables, with value 1)
the pool.  Output assembly is ordered, so results are deterministic.
"""

from __future__ import annotations

import json
import math
import os
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from ._version import VERSION
from .algebra import DualC
from .closedform import first_order_fields, second_order_fields, seed_fields
from .darboux import SolutionSample, dt_chain
from .errors import GridError, UsageError
from .seed import SeedConfig

__all__ = [
    "GridSpec", "GridMeta", "FieldGrid", "RunConfig",
    "grid_evaluate", "grid_evaluate_levels",
    "write_csv", "read_csv", "write_json", "read_json", "write_svg_heatmap",
]

_CSV_HEADER = "x,t,re_A,im_A,abs_A,re_At,im_At,B"
_SVG_MAX_CELLS = 500
_PARALLEL_THRESHOLD = 4096


@dataclass(frozen=True)
class GridSpec:
    """Uniform rectangular lattice in (x, t)."""

    x_min: float
    x_max: float
    t_min: float
    t_max: float
    nx: int
    nt: int

    def __post_init__(self):
        if not (self.x_max > self.x_min and self.t_max > self.t_min):
            raise GridError("grid bounds must satisfy max > min")
        if self.nx < 2 or self.nt < 2:
            raise GridError("grid needs at least 2 points per axis")

    @property
    def hx(self):
        return (self.x_max - self.x_min) / (self.nx - 1)

    @property
    def ht(self):
        return (self.t_max - self.t_min) / (self.nt - 1)

    def xs(self):
        return np.linspace(self.x_min, self.x_max, self.nx)

    def ts(self):
        return np.linspace(self.t_min, self.t_max, self.nt)

    def refined(self):
        """Same bounds with both spacings halved."""
        return GridSpec(self.x_min, self.x_max, self.t_min, self.t_max,
                        2 * self.nx - 1, 2 * self.nt - 1)


@dataclass(frozen=True)
class GridMeta:
    """Provenance of a grid: enough to re-evaluate it exactly."""

    a: float
    order: int
    s: tuple
    method: str
    level: int
    version: str = VERSION

    def seed_config(self):
        return SeedConfig(a=self.a, order=self.order, s=self.s)


@dataclass
class FieldGrid:
    """Fields of one level on a lattice, with the exact t-derivative channel."""

    spec: GridSpec
    meta: GridMeta
    a_val: np.ndarray          # complex, shape (nx, nt)
    a_dt: np.ndarray | None    # complex, shape (nx, nt)
    b: np.ndarray              # float, shape (nx, nt)

    def __post_init__(self):
        shape = (self.spec.nx, self.spec.nt)
        for arr in (self.a_val, self.a_dt, self.b):
            if arr is not None and arr.shape != shape:
                raise GridError(
                    f"sample array shape {arr.shape} != lattice {shape}")

    def abs_a(self):
        return np.abs(self.a_val)

    def sample(self, ix, it):
        dt = self.a_dt[ix, it] if self.a_dt is not None else 0j
        return SolutionSample(A=DualC(self.a_val[ix, it], dt),
                              B=float(self.b[ix, it]),
                              level=self.meta.level)


@dataclass(frozen=True)
class RunConfig:
    """One evaluation request: seed parameters, lattice, and method."""

    seed: SeedConfig
    grid: GridSpec
    method: str = "closed"
    fmt: str = "csv"
    out: str | None = None

    def __post_init__(self):
        if self.method not in ("closed", "engine"):
            raise UsageError(f"unknown method {self.method!r}")
        if self.fmt not in ("csv", "json", "svg"):
            raise UsageError(f"unknown format {self.fmt!r}")


def _check_closed(cfg):
    if cfg.seed.order > 2:
        raise UsageError(
            "closed method supports orders 1 and 2 only; use method=engine")


def _closed_level(cfg, level, x2, t2):
    a = cfg.seed.a
    if level == 0:
        return seed_fields(a, x2, t2)
    if level == 1:
        return first_order_fields(a, x2, t2)
    s1 = cfg.seed.s[0]
    return second_order_fields(a, s1.real, s1.imag, x2, t2)


def _engine_row(args):
    a, order, s, x, ts = args
    cfg = SeedConfig(a=a, order=order, s=s)
    n_levels = order + 1
    av = np.empty((n_levels, len(ts)), dtype=complex)
    ad = np.empty_like(av)
    b = np.empty((n_levels, len(ts)), dtype=float)
    for j, t in enumerate(ts):
        for sample in dt_chain(cfg, x, t).samples:
            av[sample.level, j] = sample.A.val
            ad[sample.level, j] = sample.A.dt
            b[sample.level, j] = sample.B
    return av, ad, b


def _worker_count(n_points):
    env = os.environ.get("ABROGUE_WORKERS")
    if env:
        return max(1, int(env))
    if n_points < _PARALLEL_THRESHOLD:
        return 1
    return min(os.cpu_count() or 1, 8)


def _engine_levels(cfg):
    spec = cfg.grid
    xs = spec.xs()
    ts = spec.ts()
    n_levels = cfg.seed.order + 1
    av = np.empty((n_levels, spec.nx, spec.nt), dtype=complex)
    ad = np.empty_like(av)
    b = np.empty((n_levels, spec.nx, spec.nt), dtype=float)
    jobs = [(cfg.seed.a, cfg.seed.order, cfg.seed.s, x, ts) for x in xs]
    workers = _worker_count(spec.nx * spec.nt)
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(_engine_row, jobs, chunksize=4))
    else:
        rows = [_engine_row(job) for job in jobs]
    for ix, (rv, rd, rb) in enumerate(rows):
        av[:, ix, :] = rv
        ad[:, ix, :] = rd
        b[:, ix, :] = rb
    return av, ad, b


def grid_evaluate_levels(cfg: RunConfig):
    """Evaluate every transformation level 0..N over the lattice."""
    spec = cfg.grid
    order = cfg.seed.order
    if cfg.method == "engine":
        av, ad, b = _engine_levels(cfg)
        levels = [(av[l], ad[l], b[l]) for l in range(order + 1)]
    else:
        _check_closed(cfg)
        x2 = spec.xs()[:, None]
        t2 = spec.ts()[None, :]
        levels = []
        for level in range(order + 1):
            lav, lad, lb = _closed_level(cfg, level, x2, t2)
            levels.append((np.broadcast_to(lav, (spec.nx, spec.nt)).copy(),
                           np.broadcast_to(lad, (spec.nx, spec.nt)).copy(),
                           np.broadcast_to(lb, (spec.nx, spec.nt)).copy()))
    grids = []
    for level, (lav, lad, lb) in enumerate(levels):
        meta = GridMeta(a=cfg.seed.a, order=order, s=cfg.seed.s,
                        method=cfg.method, level=level)
        grids.append(FieldGrid(spec=spec, meta=meta, a_val=lav,
                               a_dt=lad, b=lb.astype(float)))
    return grids


def grid_evaluate(cfg: RunConfig, level=None) -> FieldGrid:
    """Evaluate one level (default: the top one) over the lattice."""
    order = cfg.seed.order
    if level is None:
        level = order
    if not 0 <= level <= order:
        raise UsageError(f"level {level} outside 0..{order}")
    if cfg.method == "engine":
        return grid_evaluate_levels(cfg)[level]
    _check_closed(cfg)
    spec = cfg.grid
    x2 = spec.xs()[:, None]
    t2 = spec.ts()[None, :]
    lav, lad, lb = _closed_level(cfg, level, x2, t2)
    meta = GridMeta(a=cfg.seed.a, order=order, s=cfg.seed.s,
                    method=cfg.method, level=level)
    return FieldGrid(spec=spec, meta=meta,
                     a_val=np.broadcast_to(lav, (spec.nx, spec.nt)).copy(),
                     a_dt=np.broadcast_to(lad, (spec.nx, spec.nt)).copy(),
                     b=np.broadcast_to(lb, (spec.nx, spec.nt)).astype(float).copy())


# ---------------------------------------------------------------------------
# CSV
# ---------------------------------------------------------------------------

def _meta_lines(grid):
    meta, spec = grid.meta, grid.spec
    s_flat = " ".join(f"{v.real!r} {v.imag!r}" for v in meta.s)
    return [
        "# ab-rogue field grid",
        f"# version = {meta.version}",
        f"# method = {meta.method}",
        f"# level = {meta.level}",
        f"# a = {meta.a!r}",
        f"# order = {meta.order}",
        f"# s = {s_flat}",
        f"# x_min = {spec.x_min!r}",
        f"# x_max = {spec.x_max!r}",
        f"# t_min = {spec.t_min!r}",
        f"# t_max = {spec.t_max!r}",
        f"# nx = {spec.nx}",
        f"# nt = {spec.nt}",
    ]


def write_csv(grid: FieldGrid, path):
    """Write a grid as CSV (metadata preamble + one row per sample)."""
    xs = grid.spec.xs()
    ts = grid.spec.ts()
    absa = grid.abs_a()
    lines = _meta_lines(grid)
    lines.append(_CSV_HEADER)
    for ix in range(grid.spec.nx):
        x = xs[ix]
        for it in range(grid.spec.nt):
            av = grid.a_val[ix, it]
            ad = grid.a_dt[ix, it]
            lines.append(
                f"{x!r},{ts[it]!r},{av.real!r},{av.imag!r},{absa[ix, it]!r},"
                f"{ad.real!r},{ad.imag!r},{grid.b[ix, it]!r}")
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")


def _parse_meta(pairs):
    s_raw = pairs.get("s", "").split()
    s = tuple(complex(float(s_raw[i]), float(s_raw[i + 1]))
              for i in range(0, len(s_raw), 2))
    spec = GridSpec(x_min=float(pairs["x_min"]), x_max=float(pairs["x_max"]),
                    t_min=float(pairs["t_min"]), t_max=float(pairs["t_max"]),
                    nx=int(pairs["nx"]), nt=int(pairs["nt"]))
    meta = GridMeta(a=float(pairs["a"]), order=int(pairs["order"]), s=s,
                    method=pairs["method"], level=int(pairs["level"]),
                    version=pairs.get("version", VERSION))
    return spec, meta


def read_csv(path) -> FieldGrid:
    """Parse a grid written by :func:`write_csv` (bit-exact round trip)."""
    pairs = {}
    rows = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            if line.startswith("#"):
                body = line[1:].strip()
                if "=" in body:
                    key, _, value = body.partition("=")
                    pairs[key.strip()] = value.strip()
                continue
            if line == _CSV_HEADER:
                continue
            rows.append(line.split(","))
    spec, meta = _parse_meta(pairs)
    if len(rows) != spec.nx * spec.nt:
        raise GridError(f"expected {spec.nx * spec.nt} rows, found {len(rows)}")
    a_val = np.empty((spec.nx, spec.nt), dtype=complex)
    a_dt = np.empty_like(a_val)
    b = np.empty((spec.nx, spec.nt), dtype=float)
    for idx, row in enumerate(rows):
        ix, it = divmod(idx, spec.nt)
        a_val[ix, it] = complex(float(row[2]), float(row[3]))
        a_dt[ix, it] = complex(float(row[5]), float(row[6]))
        b[ix, it] = float(row[7])
    return FieldGrid(spec=spec, meta=meta, a_val=a_val, a_dt=a_dt, b=b)


# ---------------------------------------------------------------------------
# JSON
# ---------------------------------------------------------------------------

def _json_payload(grid):
    xs = grid.spec.xs()
    ts = grid.spec.ts()
    x_col = np.repeat(xs, grid.spec.nt)
    t_col = np.tile(ts, grid.spec.nx)
    flat = lambda arr: arr.reshape(-1).tolist()
    return {
        "meta": {
            "version": grid.meta.version,
            "method": grid.meta.method,
            "level": grid.meta.level,
            "a": grid.meta.a,
            "order": grid.meta.order,
            "s": [[v.real, v.imag] for v in grid.meta.s],
        },
        "spec": {
            "x_min": grid.spec.x_min, "x_max": grid.spec.x_max,
            "t_min": grid.spec.t_min, "t_max": grid.spec.t_max,
            "nx": grid.spec.nx, "nt": grid.spec.nt,
        },
        "samples": {
            "x": x_col.tolist(),
            "t": t_col.tolist(),
            "re_A": flat(grid.a_val.real),
            "im_A": flat(grid.a_val.imag),
            "abs_A": flat(grid.abs_a()),
            "re_At": flat(grid.a_dt.real),
            "im_At": flat(grid.a_dt.imag),
            "B": flat(grid.b),
        },
    }


def write_json(grid: FieldGrid, path):
    """Write a grid as JSON with flat per-column sample arrays."""
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(_json_payload(grid), fh, separators=(",", ":"))
        fh.write("\n")


def read_json(path) -> FieldGrid:
    with open(path, encoding="utf-8") as fh:
        data = json.load(fh)
    spec = GridSpec(**data["spec"])
    m = data["meta"]
    meta = GridMeta(a=m["a"], order=m["order"],
                    s=tuple(complex(re, im) for re, im in m["s"]),
                    method=m["method"], level=m["level"], version=m["version"])
    shape = (spec.nx, spec.nt)
    col = lambda name: np.array(data["samples"][name]).reshape(shape)
    return FieldGrid(spec=spec, meta=meta,
                     a_val=col("re_A") + 1j * col("im_A"),
                     a_dt=col("re_At") + 1j * col("im_At"),
                     b=col("B"))


# ---------------------------------------------------------------------------
# SVG heatmap
# ---------------------------------------------------------------------------

_VIRIDIS = (
    (68, 1, 84), (72, 20, 103), (72, 37, 118), (69, 55, 129),
    (62, 73, 137), (54, 92, 141), (46, 110, 142), (39, 127, 142),
    (33, 145, 140), (31, 161, 135), (45, 178, 125), (74, 193, 109),
    (122, 209, 81), (165, 219, 54), (210, 226, 27), (253, 231, 37),
)


def _ramp_color(u):
    """Perceptually ordered ramp, u in [0, 1]."""
    pos = min(max(u, 0.0), 1.0) * (len(_VIRIDIS) - 1)
    i = min(int(pos), len(_VIRIDIS) - 2)
    w = pos - i
    rgb = [round((1 - w) * _VIRIDIS[i][k] + w * _VIRIDIS[i + 1][k])
           for k in range(3)]
    return "#{:02x}{:02x}{:02x}".format(*rgb)


def _block_mean(arr, factor):
    edges = np.arange(0, arr.shape[0], factor)
    sums = np.add.reduceat(arr, edges, axis=0)
    counts = np.diff(np.append(edges, arr.shape[0]))
    return sums / counts[:, None]


def write_svg_heatmap(grid: FieldGrid, fld="abs_A", path="field.svg"):
    """Render one field of the grid as an SVG cell map with labeled axes."""
    if fld == "abs_A":
        values = grid.abs_a()
    elif fld == "B":
        values = np.asarray(grid.b, dtype=float)
    else:
        raise UsageError(f"unknown heatmap field {fld!r} (use abs_A or B)")
    fx = math.ceil(values.shape[0] / _SVG_MAX_CELLS)
    ft = math.ceil(values.shape[1] / _SVG_MAX_CELLS)
    if fx > 1 or ft > 1:
        warnings.warn(
            f"grid {values.shape} exceeds {_SVG_MAX_CELLS} cells per side; "
            f"block-averaging by ({fx}, {ft})", stacklevel=2)
        values = _block_mean(_block_mean(values, fx).T, ft).T
    nx, nt = values.shape
    vmin = float(values.min())
    vmax = float(values.max())
    span = vmax - vmin
    left, bottom, top, right = 64, 44, 12, 16
    plot = 560
    cw, ch = plot / nx, plot / nt
    width, height = left + plot + right, top + plot + bottom
    spec = grid.spec
    meta_blob = json.dumps({
        "field": fld, "vmin": vmin, "vmax": vmax, "ramp": "viridis16",
        "a": grid.meta.a, "order": grid.meta.order, "level": grid.meta.level,
        "method": grid.meta.method, "version": grid.meta.version,
    })
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" '
        f'height="{height}" viewBox="0 0 {width} {height}">',
        f"<metadata>{meta_blob}</metadata>",
        f'<rect width="{width}" height="{height}" fill="white"/>',
    ]
    for i in range(nx):
        x0 = left + i * cw
        for j in range(nt):
            u = 0.5 if span == 0.0 else (values[i, j] - vmin) / span
            y0 = top + plot - (j + 1) * ch
            parts.append(
                f'<rect x="{x0:.2f}" y="{y0:.2f}" width="{cw + 0.05:.2f}" '
                f'height="{ch + 0.05:.2f}" fill="{_ramp_color(u)}"/>')
    label = "|A|" if fld == "abs_A" else "B"
    axis_font = 'font-family="sans-serif" font-size="12"'
    parts += [
        f'<text x="{left + plot / 2:.0f}" y="{height - 8}" {axis_font} '
        f'text-anchor="middle">x</text>',
        f'<text x="14" y="{top + plot / 2:.0f}" {axis_font} '
        f'text-anchor="middle" transform="rotate(-90 14 {top + plot / 2:.0f})">t</text>',
        f'<text x="{left}" y="{height - 24}" {axis_font}>{spec.x_min:g}</text>',
        f'<text x="{left + plot:.0f}" y="{height - 24}" {axis_font} '
        f'text-anchor="end">{spec.x_max:g}</text>',
        f'<text x="{left - 4}" y="{top + plot:.0f}" {axis_font} '
        f'text-anchor="end">{spec.t_min:g}</text>',
        f'<text x="{left - 4}" y="{top + 12}" {axis_font} '
        f'text-anchor="end">{spec.t_max:g}</text>',
        f'<text x="{left + plot / 2:.0f}" y="{top}" {axis_font} '
        f'text-anchor="middle">{label}: [{vmin:.4g}, {vmax:.4g}]</text>',
        "</svg>",
    ]
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(parts) + "\n")
