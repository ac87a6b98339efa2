"""Machine-checkable certificates with a canonical byte encoding.

A certificate is a JSON document whose serialization is a pure function
of its content: keys sorted, floats rendered as 13-significant-digit
scientific notation, two-space indentation, no timestamps and no
environment-dependent fields. Rebuilding the same construction therefore
yields byte-identical files, and any edit to a stored certificate is
detectable by re-serializing.

Claims are double-entry: every claim names the quantity it constrains
(lhs_ref) and also embeds the value it saw (lhs_value), which must equal
quantities[lhs_ref] exactly. The margin and status are stored too, and
recheck recomputes both from the stored numbers. All claim-relevant
numbers are rounded to the serializer's 13 significant digits at build
time, so a built document is a fixed point of serialization and the
margin recomputation has a unique right answer: recheck demands exact
float equality, leaving no wiggle room in any digit. Verdicts are three
valued: PASS needs the margin to clear the tolerance (default 1e-9),
FAIL needs it to miss by the tolerance, and anything closer is
INCONCLUSIVE; too close to call is never rounded up to a pass.
"""

from __future__ import annotations

import hashlib
import json
import math
import numbers
from pathlib import Path

from . import __version__
from .errors import ParameterOutOfRange, SchemaViolation

__all__ = [
    "DEFAULT_TOLERANCE",
    "make_certificate",
    "certificate_bytes",
    "write_certificate",
    "load_certificate",
    "recheck_certificate",
]

DEFAULT_TOLERANCE = 1e-9

_OPS = (">", ">=", "<", "<=")
_STATUSES = ("PASS", "FAIL", "INCONCLUSIVE")
_TOP_KEYS = {"format_version", "kind", "parameters", "quantities", "claims",
             "artifacts", "provenance", "library_version", "status"}
_CLAIM_KEYS = {"name", "lhs_ref", "lhs_value", "op", "rhs_ref", "rhs_value",
               "margin", "tolerance", "status"}


def _canon(value, indent: int) -> str:
    pad = "  " * indent
    if isinstance(value, dict):
        if not value:
            return "{}"
        items = []
        for key in sorted(value):
            if not isinstance(key, str):
                raise SchemaViolation("certificate object keys must be strings")
            items.append(f"{pad}  {json.dumps(key)}: {_canon(value[key], indent + 1)}")
        return "{\n" + ",\n".join(items) + f"\n{pad}}}"
    if isinstance(value, (list, tuple)):
        if len(value) == 0:
            return "[]"
        items = [f"{pad}  {_canon(x, indent + 1)}" for x in value]
        return "[\n" + ",\n".join(items) + f"\n{pad}]"
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, numbers.Integral):
        return str(int(value))
    if isinstance(value, numbers.Real):
        v = float(value)
        if not math.isfinite(v):
            raise SchemaViolation("certificates must not contain non-finite numbers")
        return format(v, ".12e")
    if isinstance(value, str):
        return json.dumps(value)
    if value is None:
        return "null"
    raise SchemaViolation(
        f"unsupported value type {type(value).__name__} in certificate")


def certificate_bytes(doc: dict) -> bytes:
    """Canonical serialization; the byte-identity anchor for rechecks."""
    return (_canon(doc, 0) + "\n").encode("ascii")


def _round12(value) -> float:
    # the serializer's float precision; idempotent since 13 < 15 digits
    return float(format(float(value), ".12e"))


def _status_for(margin: float, tolerance: float) -> str:
    if margin >= tolerance:
        return "PASS"
    if margin <= -tolerance:
        return "FAIL"
    return "INCONCLUSIVE"


def _aggregate(statuses) -> str:
    statuses = list(statuses)
    if any(s == "FAIL" for s in statuses):
        return "FAIL"
    if any(s == "INCONCLUSIVE" for s in statuses):
        return "INCONCLUSIVE"
    return "PASS"


def make_certificate(kind: str, parameters: dict, quantities: dict, claims,
                     *, provenance: dict | None = None,
                     artifacts: dict | None = None,
                     tolerance: float = DEFAULT_TOLERANCE) -> dict:
    """Assemble a certificate document.

    claims is an iterable of (name, lhs_ref, op, rhs) tuples, with an
    optional fifth element overriding the tolerance for that claim; rhs
    is either a number or the name of another quantity. Margins are
    oriented so that positive always means the claim holds: lhs - rhs for
    ">" and ">=", rhs - lhs otherwise. Quantities, bounds, tolerances and
    margins are rounded to the canonical 13 significant digits here, so
    the returned document survives a write/load cycle unchanged.
    """
    if not tolerance > 0.0:
        raise ParameterOutOfRange("tolerance must be positive")
    clean = {}
    for key, val in quantities.items():
        if isinstance(val, bool) or not isinstance(val, numbers.Real):
            raise ParameterOutOfRange(f"quantity {key} must be a number")
        if not math.isfinite(float(val)):
            raise SchemaViolation(f"quantity {key} is not finite")
        clean[str(key)] = (int(val) if isinstance(val, numbers.Integral)
                           else _round12(val))
    quantities = clean
    claim_docs = []
    for spec in claims:
        if len(spec) == 4:
            name, lhs_ref, op, rhs = spec
            tol = tolerance
        else:
            name, lhs_ref, op, rhs, tol = spec
        if op not in _OPS:
            raise ParameterOutOfRange(f"unsupported comparison {op!r}")
        if lhs_ref not in quantities:
            raise ParameterOutOfRange(f"claim {name}: unknown quantity {lhs_ref!r}")
        lhs_value = float(quantities[lhs_ref])
        if isinstance(rhs, str):
            if rhs not in quantities:
                raise ParameterOutOfRange(f"claim {name}: unknown quantity {rhs!r}")
            rhs_ref, rhs_value = rhs, float(quantities[rhs])
        else:
            rhs_ref, rhs_value = None, _round12(rhs)
        tol = _round12(tol)
        if not tol > 0.0:
            raise ParameterOutOfRange(f"claim {name}: tolerance must be positive")
        margin = _round12(lhs_value - rhs_value if op in (">", ">=")
                          else rhs_value - lhs_value)
        claim_docs.append({
            "name": str(name),
            "lhs_ref": lhs_ref,
            "lhs_value": lhs_value,
            "op": op,
            "rhs_ref": rhs_ref,
            "rhs_value": rhs_value,
            "margin": margin,
            "tolerance": tol,
            "status": _status_for(margin, tol),
        })
    doc = {
        "format_version": 1,
        "kind": str(kind),
        "parameters": dict(parameters),
        "quantities": quantities,
        "claims": claim_docs,
        "artifacts": dict(artifacts) if artifacts else {},
        "provenance": dict(provenance) if provenance else {},
        "library_version": __version__,
        "status": _aggregate(c["status"] for c in claim_docs),
    }
    certificate_bytes(doc)  # fail fast on unserializable content
    return doc


def write_certificate(doc: dict, path) -> str:
    """Write canonical bytes; returns their sha256 hex digest."""
    data = certificate_bytes(doc)
    Path(path).write_bytes(data)
    return hashlib.sha256(data).hexdigest()


def load_certificate(path) -> dict:
    try:
        return json.loads(Path(path).read_text(encoding="ascii"))
    except (ValueError, UnicodeDecodeError) as exc:
        raise SchemaViolation(f"certificate is not well-formed JSON: {exc}") from exc


def _require(cond: bool, message: str) -> None:
    if not cond:
        raise SchemaViolation(message)


def _check_number(value, where: str) -> float:
    _require(isinstance(value, numbers.Real) and not isinstance(value, bool),
             f"{where} must be a number")
    value = float(value)
    _require(math.isfinite(value), f"{where} must be finite")
    return value


def recheck_certificate(source, files_dir=None) -> dict:
    """Validate a certificate's schema and internal consistency.

    source is a path or an already-loaded document. For paths, the stored
    bytes must equal the canonical re-serialization, so formatting level
    tampering is caught too, and artifact fingerprints are verified
    against files_dir (default: the certificate's own directory) when the
    referenced files are present. Raises SchemaViolation on any
    inconsistency; returns a report with the verified aggregate status.
    """
    if isinstance(source, (str, Path)):
        raw = Path(source).read_bytes()
        doc = load_certificate(source)
        _require(certificate_bytes(doc) == raw,
                 "stored bytes differ from the canonical serialization")
        if files_dir is None:
            files_dir = Path(source).parent
    else:
        doc = source
    _require(isinstance(doc, dict), "certificate must be a JSON object")
    _require(set(doc) == _TOP_KEYS,
             f"top-level keys must be exactly {sorted(_TOP_KEYS)}")
    _require(doc["format_version"] == 1, "unsupported format_version")
    _require(isinstance(doc["kind"], str), "kind must be a string")
    _require(isinstance(doc["library_version"], str),
             "library_version must be a string")
    for section in ("parameters", "quantities", "artifacts", "provenance"):
        _require(isinstance(doc[section], dict), f"{section} must be an object")
    quantities = {}
    for key, val in doc["quantities"].items():
        quantities[key] = _check_number(val, f"quantity {key}")
    _require(isinstance(doc["claims"], list), "claims must be a list")
    report_claims = []
    for i, claim in enumerate(doc["claims"]):
        where = f"claim #{i}"
        _require(isinstance(claim, dict), f"{where} must be an object")
        _require(set(claim) == _CLAIM_KEYS,
                 f"{where} keys must be exactly {sorted(_CLAIM_KEYS)}")
        _require(isinstance(claim["name"], str), f"{where} name must be a string")
        _require(claim["op"] in _OPS, f"{where} has unsupported op")
        _require(claim["status"] in _STATUSES, f"{where} has unknown status")
        lhs_ref = claim["lhs_ref"]
        _require(lhs_ref in quantities, f"{where} references unknown {lhs_ref!r}")
        lhs = _check_number(claim["lhs_value"], f"{where} lhs_value")
        _require(lhs == quantities[lhs_ref],
                 f"{where}: lhs_value disagrees with quantities[{lhs_ref!r}]")
        rhs = _check_number(claim["rhs_value"], f"{where} rhs_value")
        if claim["rhs_ref"] is not None:
            _require(claim["rhs_ref"] in quantities,
                     f"{where} references unknown {claim['rhs_ref']!r}")
            _require(rhs == quantities[claim["rhs_ref"]],
                     f"{where}: rhs_value disagrees with its reference")
        tol = _check_number(claim["tolerance"], f"{where} tolerance")
        _require(tol > 0.0, f"{where} tolerance must be positive")
        margin = _check_number(claim["margin"], f"{where} margin")
        expect = _round12(lhs - rhs if claim["op"] in (">", ">=") else rhs - lhs)
        _require(margin == expect,
                 f"{where}: stored margin {margin!r} does not match "
                 f"recomputed {expect!r}")
        _require(claim["status"] == _status_for(margin, tol),
                 f"{where}: status does not match margin and tolerance")
        report_claims.append({"name": claim["name"],
                              "status": claim["status"],
                              "margin": margin})
    _require(doc["status"] == _aggregate(c["status"] for c in doc["claims"]),
             "aggregate status does not match the claims")
    verified, missing = [], []
    for name, entry in doc["artifacts"].items():
        _require(isinstance(entry, dict) and set(entry) == {"file", "sha256"},
                 f"artifact {name} must be {{file, sha256}}")
        if files_dir is None:
            missing.append(name)
            continue
        path = Path(files_dir) / entry["file"]
        if not path.exists():
            missing.append(name)
            continue
        digest = hashlib.sha256(path.read_bytes()).hexdigest()
        _require(digest == entry["sha256"],
                 f"artifact {name}: file content does not match fingerprint")
        verified.append(name)
    return {
        "status": doc["status"],
        "kind": doc["kind"],
        "n_claims": len(doc["claims"]),
        "claims": report_claims,
        "artifacts_verified": verified,
        "artifacts_missing": missing,
    }
