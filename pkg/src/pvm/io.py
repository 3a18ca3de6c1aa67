"""CSV and JSON formats used by the command line tool.

* Matrices: comma separated, one row per line, an optional non-numeric header
  row.  Written with 17 significant digits so values round-trip exactly.
* Labels: one 1-based integer per line.
* Solutions: JSON tagged with ``SCHEMA``; prototype indices are 0-based
  columns of the dissimilarity matrix (rows of the candidate file) and
  ``prototype_sets[l]`` belongs to label l + 1.
"""

from __future__ import annotations

import csv
import json
from pathlib import Path

import numpy as np

from .data_model import InputError, PrototypeSolution

SCHEMA = "pvm-solution/1"


def _is_number(s: str) -> bool:
    try:
        float(s)
    except ValueError:
        return False
    return True


def read_matrix(path) -> np.ndarray:
    with open(path, newline="") as fh:
        rows = [r for r in csv.reader(fh) if r and any(f.strip() for f in r)]
    if not rows:
        raise InputError(f"{path}: empty file")
    if not all(_is_number(f) for f in rows[0]):
        rows = rows[1:]
    try:
        data = [[float(f) for f in r] for r in rows]
    except ValueError as exc:
        raise InputError(f"{path}: {exc}") from None
    if not data or len({len(r) for r in data}) != 1:
        raise InputError(f"{path}: rows of unequal length")
    return np.array(data, dtype=float)


def write_matrix(path, M, header=None) -> None:
    M = np.atleast_2d(np.asarray(M, dtype=float))
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        if header is not None:
            w.writerow(header)
        for row in M:
            w.writerow([format(float(v), ".17g") for v in row])


def read_labels(path) -> np.ndarray:
    values = []
    for k, line in enumerate(Path(path).read_text().splitlines()):
        line = line.strip()
        if not line:
            continue
        try:
            values.append(int(line))
        except ValueError:
            if k == 0 and not values:
                continue  # header
            raise InputError(f"{path}: bad label {line!r}") from None
    if not values:
        raise InputError(f"{path}: no labels")
    return np.array(values, dtype=np.int64)


def write_labels(path, labels) -> None:
    Path(path).write_text("".join(f"{int(v)}\n" for v in labels))


def solution_to_dict(solution: PrototypeSolution, config: dict, **extra) -> dict:
    out = {
        "schema": SCHEMA,
        "config": config,
        "num_candidates": solution.num_candidates,
        "prototype_sets": [list(P) for P in solution.prototype_sets],
        "per_class_counts": solution.counts,
    }
    if solution.objective is not None:
        out["objective"] = solution.objective.as_dict()
    out.update({k: v for k, v in extra.items() if v is not None})
    return out


def write_solution(path, solution: PrototypeSolution, config: dict, **extra) -> dict:
    doc = solution_to_dict(solution, config, **extra)
    Path(path).write_text(json.dumps(doc, indent=2) + "\n")
    return doc


def read_solution(path) -> tuple:
    """(PrototypeSolution, full document)."""
    try:
        doc = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: {exc}") from None
    if doc.get("schema") != SCHEMA:
        raise InputError(f"{path}: not a {SCHEMA} document")
    sol = PrototypeSolution(tuple(tuple(P) for P in doc["prototype_sets"]),
                            int(doc["num_candidates"]))
    return sol, doc
