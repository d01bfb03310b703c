"""CSV serialisation of runs and the plot-script emitter.

Every file starts with ``#``-prefixed ``key=value`` metadata lines, then a
header row.  Floats are written with ``repr`` so identical runs produce
byte-identical files.
"""

from __future__ import annotations

import csv
import io
import os
from pathlib import Path

import numpy as np

from . import __version__
from .belldiag import BellCurvePoint

UNITS = "c2 and entropies dimensionless; eof in bits; q-entropies in nats"
PROFILE_COLUMNS = (
    "bin_center_c2",
    "count",
    "mean",
    "dispersion",
    "derivative",
    "ratio",
    "ratio_defined",
    "low_confidence",
)


def _fmt(x) -> str:
    if isinstance(x, (bool, np.bool_)):
        return str(int(x))
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return repr(float(x))


def _write_metadata(fh, metadata: dict) -> None:
    for key, value in metadata.items():
        fh.write(f"# {key}={value}\n")


def write_scatter(fh, config, table) -> None:
    meta = {"kind": "scatter", **config.metadata(), "units": UNITS}
    _write_metadata(fh, meta)
    writer = csv.writer(fh, lineterminator="\n")
    writer.writerow(["c2", "eof", *config.channels])
    for i in range(table.c_squared.size):
        row = [table.c_squared[i], table.eof_bits[i], *table.values[:, i]]
        writer.writerow([_fmt(x) for x in row])


def write_profile(fh, profile) -> None:
    meta = {"kind": "profile", **profile.metadata, "units": UNITS}
    _write_metadata(fh, meta)
    writer = csv.writer(fh, lineterminator="\n")
    writer.writerow(PROFILE_COLUMNS)
    cols = [
        profile.centers,
        profile.counts,
        profile.mean,
        profile.dispersion,
        profile.derivative,
        profile.ratio,
        profile.ratio_defined,
        profile.low_confidence,
    ]
    for i in range(profile.centers.size):
        writer.writerow([_fmt(c[i]) for c in cols])


def write_bell_curve(fh, points: list[BellCurvePoint]) -> None:
    _write_metadata(
        fh,
        {
            "kind": "bell-curve",
            "artifact": f"qent {__version__}",
            "ensemble": "bell-diagonal",
            "q": "inf",
            "units": "c2 dimensionless; r_infinity in nats",
        },
    )
    writer = csv.writer(fh, lineterminator="\n")
    writer.writerow(["c2", "r_infinity"])
    for p in points:
        writer.writerow([_fmt(p.c_squared), _fmt(p.r_infinity)])


def profile_filename(profile) -> str:
    meta = profile.metadata
    return f"profile_{meta.get('family', 'renyi')}_q{meta.get('q', 'x')}.csv"


def read_metadata(path) -> dict:
    meta = {}
    with open(path, newline="") as fh:
        for line in fh:
            if not line.startswith("#"):
                break
            key, _, value = line[1:].strip().partition("=")
            meta[key.strip()] = value.strip()
    return meta


def read_header(path) -> list[str]:
    with open(path, newline="") as fh:
        for line in fh:
            if not line.startswith("#"):
                return next(csv.reader([line]))
    raise ValueError(f"{path} has no header row")


def read_table(path):
    """Header names and a float array of the data rows of a qent CSV."""
    with open(path, newline="") as fh:
        rows = [line for line in fh if not line.startswith("#")]
    reader = csv.reader(io.StringIO("".join(rows)))
    header = next(reader)
    data = np.array([[float(x) for x in row] for row in reader if row], dtype=float)
    return header, data.reshape(-1, len(header))


_SYMBOLS = {"renyi": "R_q", "tsallis": "S_q", "tsallis-normalized": "S_q/S_q^max"}


def _ylabel(meta: dict) -> str:
    sym = _SYMBOLS.get(meta.get("family", "renyi"), "R_q")
    quantity = meta.get("quantity", "mean")
    return {
        "mean": f"<{sym}>",
        "dispersion": f"sigma({sym})",
        "derivative": f"d<{sym}>/d(C^2)",
        "ratio": "r",
    }[quantity]


def plot_script(paths, title: str | None = None) -> str:
    """Matplotlib script drawing the given qent CSVs on one set of axes.

    The script only reads and plots; all numbers come from the CSVs.
    """
    paths = [Path(p) for p in paths]
    for p in paths:
        if not p.is_file():
            raise FileNotFoundError(f"input CSV not found: {p}")
    metas = [read_metadata(p) for p in paths]

    ylabel = "R_q"
    for meta in metas:
        if meta.get("kind") == "profile":
            ylabel = _ylabel(meta)
            break
        if meta.get("kind") == "scatter":
            ylabel = _SYMBOLS.get(meta.get("family", "renyi"), "R_q")

    lines = [
        "# generated by qent plot-script; reads the CSV files below and draws them",
        "import matplotlib.pyplot as plt",
        "import numpy as np",
        "",
        "",
        "def load(path):",
        "    return np.genfromtxt(path, delimiter=',', comments='#', names=True, deletechars='')",
        "",
        "",
        "fig, ax = plt.subplots()",
    ]
    for path, meta in zip(paths, metas):
        kind = meta.get("kind")
        src = repr(os.fspath(path))
        if kind == "bell-curve":
            lines.append(f"d = load({src})")
            lines.append("ax.plot(d['c2'], d['r_infinity'], linestyle='--', color='k', label='Bell diagonal, q=inf')")
        elif kind == "profile":
            column = meta.get("quantity", "mean")
            label = f"q={meta.get('q', '?')} ({meta.get('ensemble', 'full')})"
            lines.append(f"d = load({src})")
            lines.append(f"ax.plot(d['bin_center_c2'], d[{column!r}], linestyle='-', label={label!r})")
        elif kind == "scatter":
            lines.append(f"d = load({src})")
            header = [h for h in read_header(path) if h not in ("c2", "eof")]
            for h in header:
                label = h.split("_q", 1)[-1]
                lines.append(
                    f"ax.plot(d['c2'], d[{h!r}], linestyle='none', marker='.', markersize=1, label='q={label}')"
                )
        else:
            raise ValueError(f"{path} is not a qent CSV (kind={kind!r})")
    lines += [
        "ax.set_xlabel('C^2')",
        f"ax.set_ylabel({ylabel!r})",
    ]
    if title:
        lines.append(f"ax.set_title({title!r})")
    lines += ["ax.legend()", "plt.show()", ""]
    return "\n".join(lines)
