"""Text formats for partitions, networks, sweep tables and manifests.

Partition file::

    #multinet-partition v1
    node<TAB>a1,...,ad<TAB>label        (1-based, sorted by flat layer then node)

Network file::

    #multinet-edges v1 undirected
    a1,...,ad<TAB>i<TAB>b1,...,bd<TAB>j<TAB>weight

All files use LF line endings; floats are written with ``repr`` so that a
write/read round trip is exact.
"""
from __future__ import annotations

import csv
import json
from pathlib import Path

import numpy as np

from .core import AspectSpec, MultilayerNetwork, MultilayerPartition, MultilayerShape, ShapeError

PARTITION_HEADER = "#multinet-partition v1"
NETWORK_HEADER = "#multinet-edges v1"


class FormatError(ValueError):
    """Malformed benchmark file."""


def _coords(shape: MultilayerShape) -> list[str]:
    return [",".join(map(str, c)) for c in shape.layer_coords()]


def _fmt_weight(w: float) -> str:
    return str(int(w)) if float(w).is_integer() else repr(float(w))


def format_partition(S: MultilayerPartition) -> str:
    coords = _coords(S.shape)
    lines = [PARTITION_HEADER]
    for a in range(S.shape.n_layers):
        c = coords[a]
        lines.extend(f"{i + 1}\t{c}\t{label}" for i, label in enumerate(S.labels[a].tolist()))
    return "\n".join(lines) + "\n"


def write_partition(S: MultilayerPartition, path) -> None:
    Path(path).write_bytes(format_partition(S).encode("utf-8"))


def _parse_coords(text, lineno):
    try:
        coords = tuple(int(x) for x in text.split(","))
    except ValueError:
        raise FormatError(f"line {lineno}: bad layer coordinates {text!r}") from None
    if any(c < 1 for c in coords):
        raise FormatError(f"line {lineno}: layer coordinates are 1-based")
    return coords


def _records(path, header):
    text = Path(path).read_text(encoding="utf-8")
    lines = text.split("\n")
    if not lines or not lines[0].startswith(header):
        raise FormatError(f"{path}: missing header {header!r}")
    if lines[-1] == "":
        lines = lines[:-1]
    return lines[0], [(k + 2, line.split("\t")) for k, line in enumerate(lines[1:]) if line]


def read_partition(path, shape: MultilayerShape | None = None) -> MultilayerPartition:
    """Read a partition file.

    Without ``shape`` the aspect sizes and node count are inferred from the
    records and every aspect is taken as unordered.
    """
    _, records = _records(path, PARTITION_HEADER)
    rows = []
    for lineno, parts in records:
        if len(parts) != 3:
            raise FormatError(f"line {lineno}: expected 3 tab-separated fields")
        try:
            node, label = int(parts[0]), int(parts[2])
        except ValueError:
            raise FormatError(f"line {lineno}: node and label must be integers") from None
        rows.append((node, _parse_coords(parts[1], lineno), label))
    if not rows:
        raise FormatError(f"{path}: no records")
    d = len(rows[0][1])
    if any(len(c) != d for _, c, _ in rows):
        raise FormatError(f"{path}: inconsistent number of aspects")
    if shape is None:
        n = max(r[0] for r in rows)
        sizes = [max(r[1][k] for r in rows) for k in range(d)]
        shape = MultilayerShape(n, tuple(AspectSpec(s, False) for s in sizes))
    elif shape.d != d:
        raise ShapeError(f"file has {d} aspects, shape has {shape.d}")
    labels = np.zeros((shape.n_layers, shape.n), dtype=np.int64)
    for node, coords, label in rows:
        try:
            a = shape.flatten(coords)
        except (ShapeError, ValueError) as exc:
            raise FormatError(f"{path}: {exc}") from None
        if not 1 <= node <= shape.n:
            raise FormatError(f"{path}: node {node} outside 1..{shape.n}")
        if labels[a, node - 1]:
            raise FormatError(f"{path}: duplicate record for node {node} in layer {coords}")
        labels[a, node - 1] = label
    if len(rows) != shape.n_state_nodes or np.any(labels < 1):
        raise FormatError(f"{path}: expected one positive label per state node ({shape.n_state_nodes})")
    return MultilayerPartition(shape, labels)


def format_network(net: MultilayerNetwork) -> str:
    coords = _coords(net.shape)
    kind = "directed" if net.directed else "undirected"
    lines = [f"{NETWORK_HEADER} {kind}"]
    for a, i, b, j, w in zip(net.src_layer.tolist(), net.src_node.tolist(), net.tgt_layer.tolist(),
                             net.tgt_node.tolist(), net.weight.tolist()):
        lines.append(f"{coords[a]}\t{i + 1}\t{coords[b]}\t{j + 1}\t{_fmt_weight(w)}")
    return "\n".join(lines) + "\n"


def write_network(net: MultilayerNetwork, path) -> None:
    Path(path).write_bytes(format_network(net).encode("utf-8"))


def read_network(path, shape: MultilayerShape) -> MultilayerNetwork:
    header, records = _records(path, NETWORK_HEADER)
    kind = header[len(NETWORK_HEADER):].strip()
    if kind not in ("directed", "undirected"):
        raise FormatError(f"{path}: header must end in 'directed' or 'undirected'")
    cols = [[] for _ in range(5)]
    for lineno, parts in records:
        if len(parts) != 5:
            raise FormatError(f"line {lineno}: expected 5 tab-separated fields")
        try:
            a = shape.flatten(_parse_coords(parts[0], lineno))
            b = shape.flatten(_parse_coords(parts[2], lineno))
            i, j, w = int(parts[1]) - 1, int(parts[3]) - 1, float(parts[4])
        except (ShapeError, ValueError) as exc:
            raise FormatError(f"line {lineno}: {exc}") from None
        for col, v in zip(cols, (i, a, j, b, w)):
            col.append(v)
    si, sa, tj, tb, w = cols
    return MultilayerNetwork(shape, np.array(si, dtype=np.int64), np.array(sa, dtype=np.int64),
                             np.array(tj, dtype=np.int64), np.array(tb, dtype=np.int64),
                             np.array(w, dtype=float), directed=(kind == "directed"))


def write_csv(path_or_file, header, rows) -> None:
    """RFC-4180 CSV with LF line endings; floats use ``repr``."""
    def cell(v):
        if isinstance(v, (float, np.floating)):
            return repr(float(v))
        return v

    def emit(fh):
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([cell(v) for v in row])

    if hasattr(path_or_file, "write"):
        emit(path_or_file)
    else:
        with open(path_or_file, "w", encoding="utf-8", newline="") as fh:
            emit(fh)


def write_sweep_csv(rows, path_or_file) -> None:
    from .detection import SWEEP_HEADER
    write_csv(path_or_file, SWEEP_HEADER, [(r.mu, r.omega, r.rule, r.run, r.mean_nmi) for r in rows])


def read_csv(path) -> list[dict]:
    with open(path, encoding="utf-8", newline="") as fh:
        return list(csv.DictReader(fh))


def write_manifest(path, config: dict, seed: int, version: str, extra: dict | None = None) -> None:
    doc = {"tool": "mlbench", "version": version, "seed": seed, "config": config}
    if extra:
        doc.update(extra)
    Path(path).write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n", encoding="utf-8")


def read_manifest(path) -> dict:
    return json.loads(Path(path).read_text(encoding="utf-8"))
