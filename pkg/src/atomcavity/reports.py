"""Deterministic CSV, JSON, and SVG output plus the matching readers.

Floats are written with Python's shortest round-trip repr, so a written
table re-reads bit for bit. JSON keys are sorted. SVG rendering pins the
matplotlib hash salt and omits the date stamp, so rerunning a command
reproduces the file byte for byte on a given matplotlib version.
"""

from __future__ import annotations

import csv
import json
from pathlib import Path

import numpy as np

from .errors import TableFormatError
from .fitting import FitResult
from .qed import SpectrumScan

SVG_HASH_SALT = "atomcavity"


def _fmt(v: float) -> str:
    return repr(float(v))


def write_csv(path, columns: dict) -> None:
    """Write named columns (unit suffix in the name) of equal length."""
    names = list(columns)
    if not names:
        raise ValueError("no columns to write")
    arrays = [np.asarray(columns[n], dtype=float).ravel() for n in names]
    length = arrays[0].size
    if any(a.size != length for a in arrays):
        raise ValueError("columns must have equal length")
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(names)
        for i in range(length):
            writer.writerow([_fmt(a[i]) for a in arrays])


def read_csv(path) -> dict:
    """Read a numeric CSV written by write_csv (or shaped like one)."""
    with Path(path).open(newline="") as fh:
        rows = list(csv.reader(fh))
    rows = [r for r in rows if r]  # blank lines are harmless
    if not rows:
        raise TableFormatError("empty file")
    header = [h.strip() for h in rows[0]]
    if len(set(header)) != len(header) or any(not h for h in header):
        raise TableFormatError("header must be unique non-empty names",
                               line=1)
    data = [[] for _ in header]
    for lineno, row in enumerate(rows[1:], start=2):
        if len(row) != len(header):
            raise TableFormatError(
                f"expected {len(header)} fields, got {len(row)}", line=lineno)
        for j, cell in enumerate(row):
            try:
                data[j].append(float(cell))
            except ValueError:
                raise TableFormatError(f"non-numeric value {cell!r}",
                                       line=lineno) from None
    return {h: np.asarray(col) for h, col in zip(header, data)}


SPECTRUM_COLUMNS = ("delta_pa_MHz", "transmission")


def spectrum_to_csv(path, scan: SpectrumScan) -> None:
    write_csv(path, {SPECTRUM_COLUMNS[0]: scan.delta_pa,
                     SPECTRUM_COLUMNS[1]: scan.transmission})


def spectrum_from_csv(path) -> SpectrumScan:
    table = read_csv(path)
    for name in SPECTRUM_COLUMNS:
        if name not in table:
            raise TableFormatError(f"missing column {name!r}", line=1)
    try:
        return SpectrumScan(delta_pa=table[SPECTRUM_COLUMNS[0]],
                            transmission=table[SPECTRUM_COLUMNS[1]])
    except ValueError as exc:
        raise TableFormatError(str(exc)) from exc


def jsonable(obj):
    """Recursively convert numpy containers to plain Python."""
    if isinstance(obj, dict):
        return {str(k): jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [jsonable(v) for v in obj.tolist()]
    if isinstance(obj, (np.floating, float)):
        return float(obj)
    if isinstance(obj, (np.integer, int)):
        return int(obj)
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    return obj


def write_json(path, payload: dict) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(jsonable(payload), sort_keys=True, indent=2)
                    + "\n")


def read_json(path) -> dict:
    return json.loads(Path(path).read_text())


def fit_report(result: FitResult) -> dict:
    """JSON-ready summary of a fit."""
    return {
        "params": {n: float(v) for n, v in zip(result.param_names,
                                               result.params)},
        "sigmas": {n: float(v) for n, v in zip(result.param_names,
                                               result.sigmas)},
        "chi2": float(result.chi2),
        "dof": int(result.dof),
        "chi2_per_dof": float(result.chi2 / result.dof) if result.dof > 0
        else None,
        "converged": bool(result.converged),
        "n_iter": int(result.n_iter),
    }


def _axes(path):
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt
    plt.rcParams["svg.hashsalt"] = SVG_HASH_SALT
    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    return plt, fig, ax


def _finish(plt, fig, ax, path, xlabel, ylabel, title):
    ax.set_xlabel(xlabel)
    ax.set_ylabel(ylabel)
    if title:
        ax.set_title(title)
    if ax.get_legend_handles_labels()[0]:
        ax.legend(frameon=False)
    fig.tight_layout()
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(path, format="svg", metadata={"Date": None})
    plt.close(fig)


def plot_series(path, series, xlabel: str, ylabel: str,
                title: str | None = None) -> None:
    """Render line series [(x, y, label), ...] to a deterministic SVG."""
    plt, fig, ax = _axes(path)
    for x, y, label in series:
        ax.plot(x, y, label=label)
    _finish(plt, fig, ax, path, xlabel, ylabel, title)


def plot_histogram(path, centers, counts, xlabel: str, ylabel: str,
                   title: str | None = None, overlay=None) -> None:
    """Render a bar histogram, optionally with a fitted curve on top."""
    plt, fig, ax = _axes(path)
    centers = np.asarray(centers, dtype=float)
    width = (centers[1] - centers[0]) if centers.size > 1 else 1.0
    ax.bar(centers, counts, width=0.9 * width, label="samples")
    if overlay is not None:
        x, y, label = overlay
        ax.plot(x, y, color="C1", label=label)
    _finish(plt, fig, ax, path, xlabel, ylabel, title)


def plot_map(path, x, y, values, xlabel: str, ylabel: str,
             label: str | None = None, title: str | None = None) -> None:
    """Render values[i, j] over (y[i], x[j]) as a filled 2-d map."""
    plt, fig, ax = _axes(path)
    mesh = ax.pcolormesh(np.asarray(x), np.asarray(y),
                         np.asarray(values), shading="auto")
    fig.colorbar(mesh, ax=ax, label=label)
    _finish(plt, fig, ax, path, xlabel, ylabel, title)
