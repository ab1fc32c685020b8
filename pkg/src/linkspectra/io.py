"""File formats: triplet ingestion, dense/raw stream exports, tree JSON,
coefficient and filter CSVs.

Floats are written with 17 significant digits so every export re-ingests to
the same values and byte-identical reruns only depend on the seed.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .graphbasis import GraphBasis, GraphCoefficients
from .partition import PartitionTree, tree_from_nested
from .stream import LinkStreamMatrix, RelationSpace, full_space, next_power_of_two
from .timebasis import (
    FrequencyFilter,
    aggregation_filter,
    diff_filter,
    lowpass_filter,
)


def fmt_float(x: float) -> str:
    return f"{float(x):.17g}"


class IngestError(ValueError):
    pass


@dataclass(frozen=True)
class IngestResult:
    stream: LinkStreamMatrix
    vertex_names: tuple
    dropped: int = 0


def parse_window(text: str):
    """'t0:T' -> (t0, T)."""
    try:
        t0, count = text.split(":")
        t0, count = int(t0), int(count)
    except ValueError:
        raise IngestError(f"window must look like 't0:T', got {text!r}") from None
    if count < 1:
        raise IngestError("window length must be positive")
    return t0, count


def _iter_triplets_csv(lines):
    for lineno, line in enumerate(lines, start=1):
        line = line.strip()
        if not line:
            continue
        parts = [p.strip() for p in line.split(",")]
        if lineno == 1 and parts[0].lower() in ("t", "time"):
            continue
        if len(parts) not in (3, 4):
            raise IngestError(f"line {lineno}: expected 't,u,v[,w]', got {line!r}")
        try:
            t = int(parts[0])
            w = float(parts[3]) if len(parts) == 4 else 1.0
        except ValueError:
            raise IngestError(f"line {lineno}: malformed numeric field in {line!r}") from None
        yield t, parts[1], parts[2], w


def _iter_triplets_ndjson(lines):
    for lineno, line in enumerate(lines, start=1):
        line = line.strip()
        if not line:
            continue
        try:
            rec = json.loads(line)
            t = int(rec["t"])
            u = str(rec["u"])
            v = str(rec["v"])
            w = float(rec.get("w", 1.0))
        except (json.JSONDecodeError, KeyError, TypeError, ValueError):
            raise IngestError(f"line {lineno}: malformed NDJSON record") from None
        yield t, u, v, w


def ingest_triplets(path, fmt: str = "csv", window=None,
                    pad_vertices: bool = False) -> IngestResult:
    """Read triplet records into a dense stream over a full relation space.

    Vertices are indexed in first-seen order; duplicate triplets sum;
    out-of-window triplets are dropped and counted. ``pad_vertices`` grows
    the vertex set to the next power of two (required before SVD
    partitioning).
    """
    text = Path(path).read_text()
    if not text.strip():
        raise IngestError(f"{path}: empty input")
    it = {"csv": _iter_triplets_csv, "ndjson": _iter_triplets_ndjson}.get(fmt)
    if it is None:
        raise IngestError(f"unknown triplet format {fmt!r}")
    names: list = []
    index: dict = {}
    records = []
    dropped = 0
    for t, u, v, w in it(text.splitlines()):
        if window is not None and not (window[0] <= t < window[0] + window[1]):
            dropped += 1
            continue
        for name in (u, v):
            if name not in index:
                index[name] = len(names)
                names.append(name)
        records.append((t, index[u], index[v], w))
    if not records:
        raise IngestError("no triplets inside the window")
    if window is not None:
        t0, count = window
    else:
        times = [r[0] for r in records]
        t0, count = min(times), max(times) - min(times) + 1
    n = len(names)
    if pad_vertices:
        n = next_power_of_two(n)
    space = full_space(n)
    vals = np.zeros((count, space.num_relations))
    for t, u, v, w in records:
        vals[t - t0, u * n + v] += w
    unweighted = bool(np.all((vals == 0.0) | (vals == 1.0)))
    stream = LinkStreamMatrix(space, t0, vals, unweighted=unweighted)
    names += [f"~v{i}" for i in range(len(names), n)]
    return IngestResult(stream, tuple(names), dropped)


# ---------------------------------------------------------------------------
# dense CSV

def write_dense_csv(path, stream: LinkStreamMatrix, names=None):
    labels = stream.space.labels(names)
    lines = ["t," + ",".join(labels)]
    for row, t in zip(stream.values, stream.times):
        lines.append(str(int(t)) + "," + ",".join(fmt_float(x) for x in row))
    Path(path).write_text("\n".join(lines) + "\n")


def _names_from_labels(labels):
    names: list = []
    rels = []
    for lab in labels:
        if lab.startswith("~pad"):
            rels.append(None)
            continue
        try:
            u, v = lab.split("->")
        except ValueError:
            raise IngestError(f"bad relation label {lab!r}") from None
        for nm in (u, v):
            if nm not in names:
                names.append(nm)
        rels.append((u, v))
    index = {nm: i for i, nm in enumerate(names)}
    rels = [None if r is None else (index[r[0]], index[r[1]]) for r in rels]
    return names, rels


def read_dense_csv(path) -> IngestResult:
    lines = Path(path).read_text().splitlines()
    if not lines:
        raise IngestError(f"{path}: empty input")
    header = lines[0].split(",")
    if header[0] != "t":
        raise IngestError(f"{path}: dense CSV must start with a 't' header column")
    names, rels = _names_from_labels(header[1:])
    space = RelationSpace(len(names), tuple(rels))
    times = []
    rows = []
    for lineno, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        parts = line.split(",")
        if len(parts) != len(header):
            raise IngestError(f"line {lineno}: expected {len(header)} fields")
        times.append(int(parts[0]))
        rows.append([float(x) for x in parts[1:]])
    if not rows:
        raise IngestError(f"{path}: no data rows")
    times = np.array(times)
    if not np.array_equal(times, np.arange(times[0], times[0] + len(times))):
        raise IngestError("dense CSV times must be contiguous")
    vals = np.array(rows)
    unweighted = bool(np.all((vals == 0.0) | (vals == 1.0)))
    return IngestResult(LinkStreamMatrix(space, int(times[0]), vals, unweighted=unweighted),
                        tuple(names))


# ---------------------------------------------------------------------------
# raw binary

def write_raw(path, stream: LinkStreamMatrix, names=None):
    """JSON header line with T, M, t0 and labels, then little-endian float64
    values in row-major order."""
    header = {
        "T": stream.num_times,
        "M": stream.num_relations,
        "t0": stream.t0,
        "labels": stream.space.labels(names),
        "vertices": list(names) if names is not None
        else [str(i) for i in range(stream.space.num_vertices)],
    }
    with open(path, "wb") as fh:
        fh.write((json.dumps(header, separators=(",", ":")) + "\n").encode())
        fh.write(np.ascontiguousarray(stream.values, dtype="<f8").tobytes())


def read_raw(path) -> IngestResult:
    with open(path, "rb") as fh:
        header_line = fh.readline()
        try:
            header = json.loads(header_line)
            t = int(header["T"])
            m = int(header["M"])
            t0 = int(header["t0"])
            labels = header["labels"]
        except (json.JSONDecodeError, KeyError, TypeError, ValueError):
            raise IngestError(f"{path}: malformed raw header") from None
        data = fh.read()
    expected = t * m * 8
    if len(data) != expected:
        raise IngestError(f"{path}: payload has {len(data)} bytes, expected {expected}")
    vals = np.frombuffer(data, dtype="<f8").reshape(t, m)
    if "vertices" in header:
        # the stored vertex list fixes indices even for isolated vertices
        names = [str(x) for x in header["vertices"]]
        index = {nm: i for i, nm in enumerate(names)}
        rels = []
        for lab in labels:
            if lab.startswith("~pad"):
                rels.append(None)
                continue
            try:
                u, v = lab.split("->")
                rels.append((index[u], index[v]))
            except (ValueError, KeyError):
                raise IngestError(f"{path}: bad relation label {lab!r}") from None
    else:
        names, rels = _names_from_labels(labels)
    space = RelationSpace(len(names), tuple(rels))
    unweighted = bool(np.all((vals == 0.0) | (vals == 1.0)))
    return IngestResult(LinkStreamMatrix(space, t0, vals, unweighted=unweighted),
                        tuple(names))


def read_stream(path, fmt: str, window=None, pad_vertices: bool = False) -> IngestResult:
    if fmt in ("csv", "ndjson"):
        return ingest_triplets(path, fmt, window=window, pad_vertices=pad_vertices)
    if fmt == "dense":
        return read_dense_csv(path)
    if fmt == "raw":
        return read_raw(path)
    raise IngestError(f"unknown format {fmt!r}")


# ---------------------------------------------------------------------------
# partition trees

def write_tree_json(path, tree: PartitionTree, space: RelationSpace, names=None):
    labels = space.labels(names)

    def labelled(node):
        if isinstance(node, list):
            return [labelled(node[0]), labelled(node[1])]
        return labels[node]

    doc = {
        "num_relations": tree.num_relations,
        "labels": labels,
        "leaf_order": [int(x) for x in tree.leaf_order],
        "nested": labelled(tree.to_nested()),
    }
    Path(path).write_text(json.dumps(doc, indent=1) + "\n")


def read_tree_json(path, space: RelationSpace = None) -> PartitionTree:
    """Load and validate a tree; cross-checks the nested arrays against the
    leaf order and, when a space is given, against its size."""
    doc = json.loads(Path(path).read_text())
    try:
        m = int(doc["num_relations"])
        labels = list(doc["labels"])
        leaf_order = np.array(doc["leaf_order"], dtype=np.int64)
        nested = doc["nested"]
    except (KeyError, TypeError, ValueError):
        raise IngestError(f"{path}: malformed tree document") from None
    if space is not None and space.num_relations != m:
        raise IngestError(f"tree has {m} relations, space has {space.num_relations}")
    if len(labels) != m:
        raise IngestError("label list length does not match num_relations")
    tree = PartitionTree(leaf_order)
    index = {lab: k for k, lab in enumerate(labels)}

    def unlabelled(node):
        if isinstance(node, list):
            if len(node) != 2:
                raise IngestError("nested nodes must have two children")
            return [unlabelled(node[0]), unlabelled(node[1])]
        if node not in index:
            raise IngestError(f"unknown relation label {node!r} in tree")
        return index[node]

    rebuilt = tree_from_nested(unlabelled(nested), m)
    if not np.array_equal(rebuilt.leaf_order, tree.leaf_order):
        raise IngestError("nested arrays disagree with the stored leaf order")
    return tree


# ---------------------------------------------------------------------------
# coefficients and filters

def coefficient_labels(basis: GraphBasis) -> list:
    return [f"{k}({l})[{i}]" for k, l, i in zip(basis.column_kinds,
                                                basis.column_levels,
                                                basis.column_indices)]


def write_coefficients_csv(path, coeffs: GraphCoefficients):
    basis = coeffs.basis
    lines = ["kind,level,index,value"]
    for k, l, i, v in zip(basis.column_kinds, basis.column_levels,
                          basis.column_indices, coeffs.values):
        lines.append(f"{k},{l},{i},{fmt_float(v)}")
    Path(path).write_text("\n".join(lines) + "\n")


def read_structural_response_csv(path, basis: GraphBasis) -> np.ndarray:
    """Structural filter file (kind,level,index,value) to a response vector.

    Unlisted coefficients default to zero.
    """
    lines = Path(path).read_text().splitlines()
    response = np.zeros(basis.num_relations)
    for lineno, line in enumerate(lines, start=1):
        line = line.strip()
        if not line or (lineno == 1 and line.lower().startswith("kind")):
            continue
        parts = [p.strip() for p in line.split(",")]
        if len(parts) != 4:
            raise IngestError(f"line {lineno}: expected 'kind,level,index,value'")
        kind, level, idx, value = parts[0], int(parts[1]), int(parts[2]), float(parts[3])
        if kind == "s":
            if level != basis.level or not (0 <= idx < basis.num_scaling):
                raise IngestError(f"line {lineno}: scaling index out of range")
            response[idx] = value
        elif kind == "w":
            sl = basis.wavelet_slice(level)
            if not (0 <= idx < sl.stop - sl.start):
                raise IngestError(f"line {lineno}: wavelet index out of range")
            response[sl.start + idx] = value
        else:
            raise IngestError(f"line {lineno}: kind must be 's' or 'w'")
    return response


def structural_response(spec: str, basis: GraphBasis) -> np.ndarray:
    from .graphbasis import coarse_pass_response, detail_pass_response

    if spec == "coarse":
        return coarse_pass_response(basis)
    if spec == "detail":
        return detail_pass_response(basis)
    if spec == "all":
        return np.ones(basis.num_relations)
    return read_structural_response_csv(spec, basis)


def read_frequency_filter_csv(path, length: int) -> FrequencyFilter:
    lines = Path(path).read_text().splitlines()
    response = np.zeros(length, dtype=np.complex128)
    seen = np.zeros(length, dtype=bool)
    for lineno, line in enumerate(lines, start=1):
        line = line.strip()
        if not line or (lineno == 1 and line.lower().startswith("freq")):
            continue
        parts = [p.strip() for p in line.split(",")]
        if len(parts) != 3:
            raise IngestError(f"line {lineno}: expected 'freq_index,re,im'")
        u = int(parts[0])
        if not (0 <= u < length):
            raise IngestError(f"line {lineno}: frequency index {u} out of range")
        response[u] = float(parts[1]) + 1j * float(parts[2])
        seen[u] = True
    if not seen.any():
        raise IngestError(f"{path}: empty frequency filter")
    return FrequencyFilter(response, label=str(path))


def frequency_filter(spec: str, length: int) -> FrequencyFilter:
    """Named presets ('lowpass:<cutoff>', 'agg:<k>', 'diff', 'all') or a CSV path."""
    if spec == "diff":
        return diff_filter(length)
    if spec == "all":
        return FrequencyFilter(np.ones(length), label="all")
    if spec.startswith("agg:"):
        return aggregation_filter(int(spec.split(":", 1)[1]), length)
    if spec.startswith("lowpass:"):
        return lowpass_filter(float(spec.split(":", 1)[1]), length)
    return read_frequency_filter_csv(spec, length)


# ---------------------------------------------------------------------------
# coefficient matrices and the plot bundle

def write_grid_csv(path, values: np.ndarray, row_name: str, row_labels, col_labels):
    lines = [row_name + "," + ",".join(col_labels)]
    for lab, row in zip(row_labels, values):
        lines.append(str(lab) + "," + ",".join(fmt_float(x) for x in row))
    Path(path).write_text("\n".join(lines) + "\n")


def write_coefficient_matrix(outdir, coeffs, names=None):
    """|C| grid plus the companion long-format (re, im) file."""
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    cols = coefficient_labels(coeffs.basis)
    freqs = [str(u) for u in range(coeffs.num_times)]
    write_grid_csv(outdir / "C_abs.csv", np.abs(coeffs.values), "freq", freqs, cols)
    lines = ["freq,column,re,im"]
    for u in range(coeffs.num_times):
        for k in range(coeffs.num_relations):
            v = coeffs.values[u, k]
            lines.append(f"{u},{k},{fmt_float(v.real)},{fmt_float(v.imag)}")
    (outdir / "C_rect.csv").write_text("\n".join(lines) + "\n")


def write_plot_bundle(outdir, stream, x, f, coeffs, names=None):
    """Grids for L, X, |F| and |C|: the decomposition's three panels."""
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    labels = stream.space.labels(names)
    times = [str(int(t)) for t in stream.times]
    freqs = [str(u) for u in range(stream.num_times)]
    cols = coefficient_labels(coeffs.basis)
    write_grid_csv(outdir / "L.csv", stream.values, "t", times, labels)
    write_grid_csv(outdir / "X.csv", x, "t", times, cols)
    write_grid_csv(outdir / "F_abs.csv", np.abs(f), "freq", freqs, labels)
    write_coefficient_matrix(outdir, coeffs, names)
