"""On-disk formats: JSON manifests, dense-CSV and coordinate-triplet views,
label files, and plain CSV matrices.

Manifest::

    {"n": 3, "views": ["a.csv", {"path": "b.txt", "format": "triplets"}],
     "labels": "labels.csv"}

View paths are relative to the manifest. A bare string is read as dense CSV
when it ends in ``.csv`` and as triplets otherwise. Triplet lines are
``i j value`` with 1-based indices; lines starting with ``%`` are comments
and repeated ``(i, j)`` pairs are summed. An optional ``"symmetrize": true``
on a view entry mirrors each triplet. Floats are written with ``repr`` so a
load/save/load cycle is bit-exact.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from crsp.errors import FormatError, ValidationError
from crsp.graph import MultiViewGraph


def _read_text(path) -> str:
    try:
        return Path(path).read_text()
    except FileNotFoundError as exc:
        raise FormatError(f"missing file: {path}") from exc
    except OSError as exc:
        raise FormatError(f"cannot read {path}: {exc}") from exc


def _fmt(x: float) -> str:
    return repr(float(x))


def read_matrix_csv(path) -> np.ndarray:
    rows = []
    for lineno, line in enumerate(_read_text(path).splitlines(), 1):
        if not line.strip():
            continue
        try:
            rows.append([float(tok) for tok in line.split(",")])
        except ValueError as exc:
            raise FormatError(f"{path}:{lineno}: {exc}") from exc
    if not rows:
        raise FormatError(f"{path}: empty matrix file")
    if len({len(r) for r in rows}) != 1:
        raise FormatError(f"{path}: ragged rows")
    return np.array(rows, dtype=np.float64)


def write_matrix_csv(path, mat) -> None:
    mat = np.atleast_2d(np.asarray(mat, dtype=np.float64))
    lines = (",".join(_fmt(x) for x in row) for row in mat.tolist())
    Path(path).write_text("\n".join(lines) + "\n")


def read_dense_view(path, n: int | None = None) -> np.ndarray:
    a = read_matrix_csv(path)
    if a.shape[0] != a.shape[1]:
        raise FormatError(f"{path}: dense view is {a.shape[0]}x{a.shape[1]}, not square")
    if n is not None and a.shape[0] != n:
        raise ValidationError(f"view size mismatch: {path} has {a.shape[0]} nodes, expected {n}")
    return a


def read_triplet_view(path, n: int, symmetrize: bool = False) -> np.ndarray:
    a = np.zeros((n, n))
    for lineno, line in enumerate(_read_text(path).splitlines(), 1):
        s = line.strip()
        if not s or s.startswith("%"):
            continue
        parts = s.split()
        try:
            if len(parts) != 3:
                raise ValueError(f"expected 'i j value', got {len(parts)} fields")
            i, j, v = int(parts[0]) - 1, int(parts[1]) - 1, float(parts[2])
        except ValueError as exc:
            raise FormatError(f"{path}:{lineno}: {exc}") from exc
        if not (0 <= i < n and 0 <= j < n):
            raise ValidationError(
                f"view size mismatch: {path}:{lineno} index ({i + 1}, {j + 1}) outside 1..{n}"
            )
        a[i, j] += v
        if symmetrize and i != j:
            a[j, i] += v
    return a


def write_triplet_view(path, view) -> None:
    a = np.asarray(view, dtype=np.float64)
    ii, jj = np.nonzero(a)
    lines = [f"% {a.shape[0]} nodes, {ii.size} entries, 1-based"]
    lines += [f"{i + 1} {j + 1} {_fmt(a[i, j])}" for i, j in zip(ii.tolist(), jj.tolist())]
    Path(path).write_text("\n".join(lines) + "\n")


def read_labels(path) -> np.ndarray:
    out = []
    for lineno, line in enumerate(_read_text(path).splitlines(), 1):
        s = line.strip()
        if not s:
            continue
        try:
            out.append(int(s))
        except ValueError as exc:
            raise FormatError(f"{path}:{lineno}: not an integer label: {s!r}") from exc
    return np.array(out, dtype=np.int64)


def write_labels(path, labels) -> None:
    Path(path).write_text("".join(f"{int(x)}\n" for x in np.asarray(labels).ravel()))


def _view_entry(entry) -> tuple[str, str | None, bool]:
    if isinstance(entry, str):
        return entry, None, False
    if isinstance(entry, dict) and "path" in entry:
        return entry["path"], entry.get("format"), bool(entry.get("symmetrize", False))
    raise FormatError(f"bad view entry in manifest: {entry!r}")


def load_manifest(manifest_path) -> tuple[MultiViewGraph, np.ndarray | None]:
    """Load a graph and its optional ground-truth labels from a manifest."""
    manifest_path = Path(manifest_path)
    try:
        spec = json.loads(_read_text(manifest_path))
    except json.JSONDecodeError as exc:
        raise FormatError(f"{manifest_path}: invalid JSON: {exc}") from exc
    if not isinstance(spec, dict) or "views" not in spec:
        raise FormatError(f"{manifest_path}: manifest needs a 'views' list")
    base = manifest_path.parent
    n = spec.get("n")
    views = []
    for entry in spec["views"]:
        rel, fmt, sym = _view_entry(entry)
        path = base / rel
        fmt = fmt or ("dense" if path.suffix.lower() == ".csv" else "triplets")
        if fmt == "dense":
            views.append(read_dense_view(path, n))
        elif fmt == "triplets":
            if n is None:
                raise FormatError(f"{manifest_path}: triplet views need 'n' in the manifest")
            views.append(read_triplet_view(path, int(n), sym))
        else:
            raise FormatError(f"{manifest_path}: unknown view format {fmt!r}")
    if not views:
        raise FormatError(f"{manifest_path}: no views listed")
    sizes = sorted({v.shape[0] for v in views})
    if len(sizes) > 1:
        raise ValidationError(f"view size mismatch: {sizes}")
    graph = MultiViewGraph(tuple(views), tuple(spec.get("node_ids") or ()))
    labels = None
    if spec.get("labels"):
        labels = read_labels(base / spec["labels"])
        if labels.size != graph.n:
            raise ValidationError(f"labels file has {labels.size} entries for {graph.n} nodes")
    return graph, labels


def load_multiview_graph(manifest_path) -> MultiViewGraph:
    return load_manifest(manifest_path)[0]


def save_multiview_graph(
    out_dir, graph: MultiViewGraph, labels=None, fmt: str = "dense"
) -> Path:
    """Write views, optional labels and ``manifest.json``; returns the manifest path."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    entries = []
    for i, v in enumerate(graph.views, 1):
        if fmt == "dense":
            name = f"view{i}.csv"
            write_matrix_csv(out / name, v)
            entries.append(name)
        elif fmt == "triplets":
            name = f"view{i}.txt"
            write_triplet_view(out / name, v)
            entries.append({"path": name, "format": "triplets"})
        else:
            raise ValidationError(f"unknown view format {fmt!r}")
    manifest = {"n": graph.n, "views": entries}
    if labels is not None:
        write_labels(out / "labels.csv", labels)
        manifest["labels"] = "labels.csv"
    if graph.node_ids != tuple(range(graph.n)):
        manifest["node_ids"] = [
            x.item() if isinstance(x, np.generic) else x for x in graph.node_ids
        ]
    path = out / "manifest.json"
    path.write_text(json.dumps(manifest, indent=2) + "\n")
    return path
