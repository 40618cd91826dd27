"""Reading and writing datasets, traces, and result reports.

Scientific payloads are serialized deterministically (sorted keys, repr
floats); timestamps and host information live in a separate ``meta`` block
so identical runs produce byte-identical payload sections.
"""

from __future__ import annotations

import csv
import datetime
import json
import math
import platform
import warnings
from pathlib import Path

import numpy as np

from .descent import IterateTrace
from .errors import InvariantViolation, ParseError
from .frechet import CenterResult, WeightedPoints
from .geometry import Manifold, get_manifold

# Sums this close to 1 are renormalized with a warning instead of rejected.
WEIGHT_SUM_BAND = 1e-6


def _meta_block(wall_time_s: float | None = None) -> dict:
    meta = {
        "created_utc": datetime.datetime.now(datetime.timezone.utc).isoformat(),
        "host": platform.node(),
    }
    if wall_time_s is not None:
        meta["wall_time_s"] = wall_time_s
    return meta


def write_json(payload: dict, path) -> None:
    Path(path).write_text(
        json.dumps(payload, sort_keys=True, indent=2) + "\n", encoding="utf-8"
    )


def _registry_dim(man: Manifold) -> int:
    # The dim argument get_manifold expects: matrix size for spd.
    return man.n if man.tag == "spd" else man.dim


def _normalized_weights(raw) -> np.ndarray:
    weights = np.asarray(raw, dtype=float)
    total = math.fsum(weights)
    if total != 1.0:
        if abs(total - 1.0) <= WEIGHT_SUM_BAND:
            warnings.warn(
                f"weights sum to {total!r}; renormalizing", stacklevel=3
            )
            weights = weights / total
        else:
            raise InvariantViolation(
                f"weights sum to {total!r}, outside the renormalization band"
            )
    return weights


def _build_points(man: Manifold, rows) -> tuple:
    points = []
    for i, row in enumerate(rows):
        try:
            points.append(man.point(row))
        except InvariantViolation as e:
            raise InvariantViolation(f"point {i}: {e}") from e
    return tuple(points)


def load_dataset(path, manifold: Manifold | None = None) -> WeightedPoints:
    """Load a weighted data set from a ``.json`` or ``.csv`` file.

    JSON files are self-describing ({manifold, dim, points, weights}); CSV
    files need either a ``# manifold=<tag> dim=<n>`` first line or the
    ``manifold`` argument.  Points are validated individually and weights
    are renormalized only inside a 1e-6 band around one.
    """
    path = Path(path)
    if path.suffix.lower() == ".json":
        try:
            blob = json.loads(path.read_text(encoding="utf-8"))
        except json.JSONDecodeError as e:
            raise ParseError(f"{path}: invalid JSON ({e})") from e
        try:
            tag, dim = blob["manifold"], int(blob["dim"])
            rows, weights = blob["points"], blob["weights"]
        except (KeyError, TypeError, ValueError) as e:
            raise ParseError(f"{path}: missing or malformed field ({e})") from e
        file_man = get_manifold(tag, dim)
        if manifold is not None and manifold != file_man:
            raise ParseError(
                f"{path}: file declares {file_man!r}, caller expected {manifold!r}"
            )
        return WeightedPoints(
            _build_points(file_man, rows), _normalized_weights(weights)
        )

    if path.suffix.lower() == ".csv":
        rows, weights = [], []
        with path.open(newline="", encoding="utf-8") as fh:
            first = fh.readline()
            if first.startswith("#"):
                try:
                    fields = dict(
                        item.split("=") for item in first[1:].strip().split()
                    )
                    manifold = get_manifold(fields["manifold"], int(fields["dim"]))
                except (KeyError, ValueError) as e:
                    raise ParseError(f"{path}: bad manifold header line") from e
            else:
                fh.seek(0)
            if manifold is None:
                raise ParseError(
                    f"{path}: CSV has no manifold header and none was supplied"
                )
            reader = csv.reader(fh)
            header = next(reader, None)
            if header is None or header[0] != "weight":
                raise ParseError(f"{path}: expected header starting with 'weight'")
            for line_no, row in enumerate(reader, start=3):
                try:
                    weights.append(float(row[0]))
                    rows.append([float(v) for v in row[1:]])
                except (IndexError, ValueError) as e:
                    raise ParseError(f"{path}: line {line_no}: {e}") from e
        return WeightedPoints(
            _build_points(manifold, rows), _normalized_weights(weights)
        )

    raise ParseError(f"{path}: unsupported dataset extension {path.suffix!r}")


def save_dataset(data: WeightedPoints, path) -> None:
    man = data.manifold
    payload = {
        "manifold": man.tag,
        "dim": _registry_dim(man),
        "points": [p.coords.tolist() for p in data.points],
        "weights": data.weights.tolist(),
    }
    write_json(payload, path)


def emit_trace(trace: IterateTrace, path) -> None:
    """Write a trace as CSV with columns k, f, grad_norm, t, dist_to_final.

    Floats are written with repr (shortest round-trip form); the final row
    has no step entry.
    """
    dist = trace.dist_to_final()
    with Path(path).open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["k", "f", "grad_norm", "t", "dist_to_final"])
        for k in range(len(trace)):
            step = repr(float(trace.steps[k])) if k < trace.n_transitions else ""
            writer.writerow(
                [
                    k,
                    repr(float(trace.values[k])),
                    repr(float(trace.grad_norms[k])),
                    step,
                    repr(float(dist[k])),
                ]
            )


def load_trace_csv(path) -> dict[str, np.ndarray]:
    """Read back the numeric columns written by :func:`emit_trace`."""
    columns: dict[str, list[float]] = {
        "k": [], "f": [], "grad_norm": [], "t": [], "dist_to_final": []
    }
    with Path(path).open(newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames != list(columns):
            raise ParseError(f"{path}: unexpected trace columns {reader.fieldnames}")
        for row in reader:
            for name in columns:
                raw = row[name]
                columns[name].append(math.nan if raw == "" else float(raw))
    return {name: np.array(vals) for name, vals in columns.items()}


def trace_payload(trace: IterateTrace) -> dict:
    """Full-precision JSON payload of a trace, including iterate coordinates."""
    return {
        "manifold": trace.manifold.tag,
        "dim": _registry_dim(trace.manifold),
        "status": trace.status.value,
        "rule": trace.rule_info,
        "points": [p.coords.tolist() for p in trace.points],
        "values": trace.values.tolist(),
        "grad_norms": trace.grad_norms.tolist(),
        "steps": trace.steps.tolist(),
    }


def save_trace_json(trace: IterateTrace, path) -> None:
    write_json(
        {"meta": _meta_block(trace.wall_time_s), "trace": trace_payload(trace)}, path
    )


def center_result_payload(result: CenterResult) -> dict:
    rate = result.certificates.get("rate_fit")
    validation = result.certificates.get("validation")
    return {
        "manifold": result.center.manifold.tag,
        "dim": _registry_dim(result.center.manifold),
        "center": result.center.coords.tolist(),
        "value": result.trace.final_value,
        "status": result.trace.status.value,
        "iterations": result.trace.n_transitions,
        "converged": result.converged,
        "certificates": {
            "grad_norm_final": result.certificates.get("grad_norm_final"),
            "rate_fit": rate.to_dict() if rate is not None else None,
            "validation": validation.to_dict() if validation is not None else None,
        },
    }


def save_center_result(result: CenterResult, path) -> None:
    write_json(
        {
            "meta": _meta_block(result.trace.wall_time_s),
            "result": center_result_payload(result),
        },
        path,
    )
