"""File formats: space and chain documents, canonical JSON, atomic writes.

Spaces and chains are JSON documents.  Chain coefficients are decimal
strings so arbitrary-precision integers survive any JSON parser.  The
canonical serialization (sorted keys, fixed float formatting with 17
significant digits, sorted simplices) is byte-stable under parse/serialize
round trips, which makes reports reproducible byte-for-byte.
"""

from __future__ import annotations

import json
import math
import os
import tempfile
from typing import Optional

from .chains import Chain, SimplicialComplex, sort_with_sign
from .errors import StructuralError
from .geom import MetricComplex


def format_float(x: float) -> str:
    if not math.isfinite(x):
        raise StructuralError("non-finite float in document")
    return format(float(x), ".17g")


def canonical_json(obj) -> str:
    """Deterministic JSON text: sorted keys, floats at 17 significant digits."""
    pieces: list[str] = []
    _write(obj, pieces)
    return "".join(pieces)


def _write(obj, out: list[str]):
    if obj is None:
        out.append("null")
    elif obj is True:
        out.append("true")
    elif obj is False:
        out.append("false")
    elif isinstance(obj, int):
        out.append(str(obj))
    elif isinstance(obj, float):
        out.append(format_float(obj))
    elif isinstance(obj, str):
        out.append(json.dumps(obj))
    elif isinstance(obj, dict):
        out.append("{")
        first = True
        for key in sorted(obj):
            if not isinstance(key, str):
                raise StructuralError("document keys must be strings")
            if not first:
                out.append(",")
            out.append(json.dumps(key))
            out.append(":")
            _write(obj[key], out)
            first = False
        out.append("}")
    elif isinstance(obj, (list, tuple)):
        out.append("[")
        for i, item in enumerate(obj):
            if i:
                out.append(",")
            _write(item, out)
        out.append("]")
    else:
        raise StructuralError(f"cannot serialize {type(obj).__name__}")


def write_atomic(path: str, text: str):
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".fillbound-", suffix=".tmp")
    try:
        with os.fdopen(fd, "w") as handle:
            handle.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


# ---------------------------------------------------------------------------
# space documents


def space_to_dict(space: MetricComplex, metadata: Optional[dict] = None) -> dict:
    k = space.complex
    doc = {
        "ambient_dim": len(space.coords[0]),
        "vertices": [list(p) for p in space.coords],
        "triangles": [list(t) for t in k.simplices(2)],
        "edges": [list(e) for e in k.simplices(1)],
        "metadata": metadata or {},
    }
    if space.radial is not None:
        doc["radial"] = list(space.radial)
    if space.region is not None:
        doc["region"] = list(space.region)
    return doc


def space_from_dict(doc: dict) -> MetricComplex:
    if not isinstance(doc, dict):
        raise StructuralError("space document must be a JSON object")
    try:
        ambient = int(doc["ambient_dim"])
        vertices = doc["vertices"]
        triangles = doc.get("triangles", [])
    except (KeyError, TypeError, ValueError) as err:
        raise StructuralError(f"malformed space document: {err}") from err
    if not isinstance(vertices, list) or not vertices:
        raise StructuralError("space needs a nonempty vertex list")
    coords = []
    for i, row in enumerate(vertices):
        if not isinstance(row, list) or len(row) != ambient:
            raise StructuralError(f"vertex {i} does not have {ambient} coordinates")
        coords.append(tuple(float(x) for x in row))
    simplices = [tuple(int(v) for v in t) for t in triangles]
    for extra in doc.get("edges", []):
        simplices.append(tuple(int(v) for v in extra))
    if not simplices:
        raise StructuralError("space has no edges or triangles")
    complex = SimplicialComplex.from_simplices(simplices, n_vertices=len(coords))
    radial = doc.get("radial")
    region = doc.get("region")
    return MetricComplex(
        complex=complex,
        coords=tuple(coords),
        radial=None if radial is None else tuple(float(x) for x in radial),
        region=None if region is None else tuple(str(x) for x in region),
    )


def load_space(path: str) -> MetricComplex:
    with open(path) as handle:
        doc = json.load(handle)
    return space_from_dict(doc)


def save_space(path: str, space: MetricComplex, metadata: Optional[dict] = None):
    write_atomic(path, canonical_json(space_to_dict(space, metadata)) + "\n")


# ---------------------------------------------------------------------------
# chain documents


def chain_to_dict(space: MetricComplex, chain: Chain) -> dict:
    k = space.complex
    entries = []
    for idx, coeff in sorted(chain.items()):
        simplex = k.simplices(chain.dim)[idx]
        entries.append([list(simplex), str(coeff)])
    return {"dim": chain.dim, "entries": entries}


def chain_from_dict(space: MetricComplex, doc: dict) -> Chain:
    if not isinstance(doc, dict):
        raise StructuralError("chain document must be a JSON object")
    try:
        dim = int(doc["dim"])
        entries = doc["entries"]
    except (KeyError, TypeError, ValueError) as err:
        raise StructuralError(f"malformed chain document: {err}") from err
    if not isinstance(entries, list):
        raise StructuralError("chain entries must be a list")
    acc: dict[int, int] = {}
    for item in entries:
        if not (isinstance(item, list) and len(item) == 2):
            raise StructuralError(f"malformed chain entry {item!r}")
        verts, coeff_str = item
        try:
            coeff = int(coeff_str)
        except (TypeError, ValueError) as err:
            raise StructuralError(f"bad coefficient {coeff_str!r}") from err
        if coeff == 0:
            raise StructuralError("chain entries must have nonzero coefficients")
        canon, sign = sort_with_sign(tuple(int(v) for v in verts))
        idx = space.complex.index_of(dim, canon)
        acc[idx] = acc.get(idx, 0) + sign * coeff
    return Chain(dim, acc)


def load_chain(path: str, space: MetricComplex) -> Chain:
    with open(path) as handle:
        doc = json.load(handle)
    return chain_from_dict(space, doc)


def save_chain(path: str, space: MetricComplex, chain: Chain):
    write_atomic(path, canonical_json(chain_to_dict(space, chain)) + "\n")
