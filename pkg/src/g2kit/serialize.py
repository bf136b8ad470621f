"""Versioned JSON encodings for forms, matrices, parameters and structures.

Scalars serialize as "p/q" strings in exact data and as floats otherwise;
a float coefficient inside exact-mode input is malformed (ParseError), not a
silent promotion.  Structures store content hashes; loading recomputes the
derived data and refuses a payload whose hashes do not match.
"""
from __future__ import annotations

import hashlib
import json
from fractions import Fraction

from .bryant import TwistParams
from .context import EXACT, FLOAT, Context
from .errors import DegreeError, ExactModeError, ParseError
from .exterior import DIM, NK, POS, KForm, Metric, Orientation
from .g2core import G2Structure

SCHEMA_VERSION = 1


def canonical_json(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))


def sha256_hex(text: str) -> str:
    return hashlib.sha256(text.encode("utf-8")).hexdigest()


def scalar_to_json(x):
    if isinstance(x, float):
        return x
    return str(Fraction(x))


def _require(cond: bool, msg: str):
    if not cond:
        raise ParseError(msg)


def _scalar_from_json(v, ctx: Context):
    _require(isinstance(v, (int, float, str)) and not isinstance(v, bool), f"bad scalar {v!r}")
    try:
        return ctx.scalar(v)
    except ExactModeError as exc:
        raise ParseError(str(exc)) from exc


def kform_to_json(a: KForm) -> dict:
    return {
        "degree": a.degree,
        "entries": [
            {"idx": list(idx), "coeff": scalar_to_json(c)} for idx, c in a.entries()
        ],
    }


def kform_from_json(obj, ctx: Context) -> KForm:
    _require(isinstance(obj, dict), "form payload must be an object")
    _require(set(obj) == {"degree", "entries"}, "form payload needs exactly degree and entries")
    degree = obj["degree"]
    _require(isinstance(degree, int) and not isinstance(degree, bool) and 0 <= degree <= DIM,
             f"bad degree {degree!r}")
    entries = obj["entries"]
    _require(isinstance(entries, list), "entries must be a list")
    coeffs = [ctx.scalar(0)] * NK[degree]
    seen = set()
    for e in entries:
        _require(isinstance(e, dict) and set(e) == {"idx", "coeff"},
                 "each entry needs exactly idx and coeff")
        idx = e["idx"]
        _require(isinstance(idx, list) and len(idx) == degree, f"bad idx length in {e!r}")
        _require(all(isinstance(i, int) and not isinstance(i, bool) and 1 <= i <= DIM for i in idx),
                 f"idx values must be 1..7 in {e!r}")
        key = tuple(idx)
        _require(all(a < b for a, b in zip(key, key[1:])), f"idx must be strictly increasing in {e!r}")
        _require(key not in seen, f"duplicate idx {key}")
        seen.add(key)
        coeffs[POS[degree][key]] = _scalar_from_json(e["coeff"], ctx)
    return KForm(degree, tuple(coeffs))


def matrix_to_json(rows) -> dict:
    flat_vals = [scalar_to_json(x) for row in rows for x in row]
    return {"shape": [DIM, DIM], "entries": flat_vals}


def matrix_from_json(obj, ctx: Context):
    _require(isinstance(obj, dict), "matrix payload must be an object")
    _require(set(obj) == {"shape", "entries"}, "matrix payload needs exactly shape and entries")
    _require(obj["shape"] == [DIM, DIM], f"matrix shape must be [7, 7], got {obj['shape']!r}")
    entries = obj["entries"]
    _require(isinstance(entries, list) and len(entries) == DIM * DIM,
             "matrix needs 49 row-major entries")
    vals = [_scalar_from_json(v, ctx) for v in entries]
    return tuple(tuple(vals[i * DIM:(i + 1) * DIM]) for i in range(DIM))


def twistparams_to_json(p: TwistParams) -> dict:
    return {"c": scalar_to_json(p.c), "omega": kform_to_json(p.omega)}


def twistparams_from_json(obj, ctx: Context) -> TwistParams:
    _require(isinstance(obj, dict), "parameter payload must be an object")
    _require(set(obj) == {"c", "omega"}, "parameter payload needs exactly c and omega")
    omega = kform_from_json(obj["omega"], ctx)
    try:
        return TwistParams(_scalar_from_json(obj["c"], ctx), omega)
    except DegreeError as exc:
        raise ParseError(str(exc)) from exc


def g2structure_to_json(s: G2Structure) -> dict:
    phi_json = kform_to_json(s.phi)
    derived = {
        "metric": matrix_to_json(s.metric.rows),
        "orientation": s.orientation.sign,
        "vol": kform_to_json(s.vol),
    }
    return {
        "schema_version": SCHEMA_VERSION,
        "mode": s.ctx.mode,
        "phi": phi_json,
        "phi_sha256": sha256_hex(canonical_json(phi_json)),
        "derived_sha256": sha256_hex(canonical_json(derived)),
    }


def g2structure_from_json(obj) -> G2Structure:
    _require(isinstance(obj, dict), "structure payload must be an object")
    _require(
        set(obj) == {"schema_version", "mode", "phi", "phi_sha256", "derived_sha256"},
        "structure payload has unexpected keys",
    )
    _require(obj["schema_version"] == SCHEMA_VERSION,
             f"unsupported schema_version {obj['schema_version']!r}")
    _require(obj["mode"] in ("exact", "float"), f"bad mode {obj['mode']!r}")
    ctx = EXACT if obj["mode"] == "exact" else FLOAT
    phi = kform_from_json(obj["phi"], ctx)
    if sha256_hex(canonical_json(kform_to_json(phi))) != obj["phi_sha256"]:
        raise ParseError("stored phi hash does not match the payload")
    s = G2Structure(phi, ctx)
    derived = {
        "metric": matrix_to_json(s.metric.rows),
        "orientation": s.orientation.sign,
        "vol": kform_to_json(s.vol),
    }
    if sha256_hex(canonical_json(derived)) != obj["derived_sha256"]:
        raise ParseError("regenerated metric/volume hash does not match the stored one")
    return s
