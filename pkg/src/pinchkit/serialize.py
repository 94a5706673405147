"""JSON and CSV codecs for matrices, frames, hulls and certificates.

Matrices serialize as {"rows", "cols", "entries"} with entries a row-major
list of [re, im] pairs.  All floats go through Python's repr, so parsing a
serialized object reproduces every numeric field exactly.
"""

from __future__ import annotations

import json
from typing import Any

import numpy as np

from .errors import BadSpec
from .linalg import Frame, as_matrix


def matrix_to_json(m) -> dict[str, Any]:
    a = as_matrix(m)
    entries = [[float(z.real), float(z.imag)] for z in a.ravel()]
    return {"rows": int(a.shape[0]), "cols": int(a.shape[1]), "entries": entries}


def matrix_from_json(obj) -> np.ndarray:
    try:
        rows, cols = int(obj["rows"]), int(obj["cols"])
        entries = obj["entries"]
    except (KeyError, TypeError) as exc:
        raise BadSpec(f"malformed matrix object: {exc}") from exc
    if len(entries) != rows * cols:
        raise BadSpec(
            f"matrix entry count {len(entries)} does not match {rows}x{cols}"
        )
    flat = np.array([complex(re, im) for re, im in entries], dtype=complex)
    return flat.reshape(rows, cols)


def frame_to_json(f: Frame) -> dict[str, Any]:
    return {
        "ambient_dim": f.ambient_dim,
        "rank": f.rank,
        "columns": matrix_to_json(f.columns),
    }


def frame_from_json(obj) -> Frame:
    return Frame(matrix_from_json(obj["columns"]))


def hull_to_csv_rows(hull) -> list[str]:
    rows = ["theta,support,re,im"]
    for theta, sup, pt in zip(hull.thetas, hull.supports, hull.points):
        rows.append(f"{theta!r},{sup!r},{pt.real!r},{pt.imag!r}")
    return rows


def certificate_to_json(cert) -> dict[str, Any]:
    """Pinching certificate to a JSON-ready dict (see PinchingCertificate)."""
    return {
        "frames": [frame_to_json(f) for f in cert.frames],
        "residuals": [float(r) for r in cert.residuals],
        "orthogonality": float(cert.orthogonality),
        "coverage": float(cert.coverage),
        "mass_bounds": [
            None if mb is None else [float(mb[0]), float(mb[1])]
            for mb in cert.mass_bounds
        ],
    }


def certificate_from_json(obj):
    from .pinching import PinchingCertificate

    return PinchingCertificate(
        frames=[frame_from_json(f) for f in obj["frames"]],
        residuals=[float(r) for r in obj["residuals"]],
        orthogonality=float(obj["orthogonality"]),
        coverage=float(obj["coverage"]),
        mass_bounds=[None if mb is None else (mb[0], mb[1]) for mb in obj["mass_bounds"]],
    )


def disc_certificate_to_json(cert) -> dict[str, Any]:
    return {
        "radius": float(cert.radius),
        "margin": float(cert.margin),
        "min_support_theta": float(cert.min_support_theta),
    }


def dump_json(obj, path) -> None:
    with open(path, "w") as fh:
        json.dump(obj, fh, indent=2)
        fh.write("\n")


def load_json(path):
    with open(path) as fh:
        return json.load(fh)
