"""Model files, JSON reports and standalone certificate checking.

Files use 1-based node indices; everything in memory is 0-based.  The
conversion happens only here and in the CLI.
"""

from __future__ import annotations

import json
from fractions import Fraction
from typing import Any

from .matrix import (
    InvalidInputError,
    RationalMatrix,
    SystemPair,
    controllability_matrix,
    rational_str,
    selection_matrix,
    to_rational,
)

SCHEMA_VERSION = 1

# evidence / trace keys whose integer values are node indices
NODE_KEYS = frozenset({
    "follower", "leader", "leaders", "clusters", "layers", "failing_pair", "permutation", "nodes", "parent",
})


class ModelError(InvalidInputError):
    def __init__(self, message: str, path: str = "", line: int | None = None):
        where = path or "<model>"
        if line is not None:
            where = f"line {line}: {where}"
        super().__init__(f"{where}: {message}")
        self.path = path
        self.line = line


def _rational_at(value: Any, path: str) -> Fraction:
    if isinstance(value, float):
        raise ModelError(f"decimal {value!r} not accepted, use an integer or 'p/q'", path)
    try:
        return to_rational(value)
    except InvalidInputError as exc:
        raise ModelError(str(exc), path) from None


def _matrix_at(value: Any, path: str, nrows: int | None = None, ncols: int | None = None) -> RationalMatrix:
    if not isinstance(value, list) or not all(isinstance(r, list) for r in value):
        raise ModelError("expected a list of rows", path)
    if nrows is not None and len(value) != nrows:
        raise ModelError(f"expected {nrows} rows, got {len(value)}", path)
    rows = []
    for i, r in enumerate(value):
        if ncols is not None and len(r) != ncols:
            raise ModelError(f"expected {ncols} entries, got {len(r)}", f"{path}[{i}]")
        rows.append([_rational_at(x, f"{path}[{i}][{j}]") for j, x in enumerate(r)])
    if rows and len({len(r) for r in rows}) != 1:
        raise ModelError("ragged rows", path)
    return RationalMatrix(rows, ncols=ncols)


def parse_model(text: str) -> SystemPair:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ModelError(exc.msg, line=exc.lineno) from None
    return model_from_dict(data)


def model_from_dict(data: Any) -> SystemPair:
    if not isinstance(data, dict):
        raise ModelError("model must be a JSON object")
    n = data.get("n")
    if not isinstance(n, int) or isinstance(n, bool) or n < 1:
        raise ModelError("n must be a positive integer", "n")
    if "A" not in data:
        raise ModelError("missing", "A")
    A = _matrix_at(data["A"], "A", n, n)
    b_field = data.get("B")
    if not isinstance(b_field, dict) or len(b_field) != 1 or not ({"leaders", "matrix"} & b_field.keys()):
        raise ModelError('expected {"leaders": [...]} or {"matrix": [[...]]}', "B")
    if "leaders" in b_field:
        leaders = b_field["leaders"]
        if not isinstance(leaders, list) or not leaders:
            raise ModelError("expected a nonempty list", "B.leaders")
        for k, l in enumerate(leaders):
            if not isinstance(l, int) or isinstance(l, bool) or not 1 <= l <= n:
                raise ModelError(f"leader {l!r} out of range [1, {n}]", f"B.leaders[{k}]")
        if any(b <= a for a, b in zip(leaders, leaders[1:])):
            raise ModelError("leader indices must be strictly increasing", "B.leaders")
        B = selection_matrix(n, [l - 1 for l in leaders])
    else:
        B = _matrix_at(b_field["matrix"], "B.matrix", n)
        if B.ncols < 1:
            raise ModelError("B needs at least one column", "B.matrix")
    meta = data.get("metadata") or {}
    if not isinstance(meta, dict):
        raise ModelError("expected an object", "metadata")
    return SystemPair(A, B, meta)


def model_to_dict(pair: SystemPair) -> dict:
    out: dict = {"n": pair.n, "A": pair.A.to_strings()}
    if pair.leaders is not None and list(pair.leaders) == sorted(pair.leaders):
        out["B"] = {"leaders": [l + 1 for l in pair.leaders]}
    else:
        out["B"] = {"matrix": pair.B.to_strings()}
    if pair.meta:
        out["metadata"] = dict(pair.meta)
    return out


def to_jsonable(obj: Any, key: str | None = None) -> Any:
    """Fractions to strings, sets to sorted lists, node indices to 1-based."""
    node = key in NODE_KEYS
    if isinstance(obj, bool) or obj is None or isinstance(obj, str):
        return obj
    if isinstance(obj, int):
        return obj + 1 if node else obj
    if isinstance(obj, float):
        return "inf" if obj == float("inf") else obj
    if isinstance(obj, Fraction):
        return rational_str(obj)
    if isinstance(obj, RationalMatrix):
        return obj.to_strings()
    if isinstance(obj, dict):
        out = {}
        for k, v in obj.items():
            if node and isinstance(k, int):
                out[str(k + 1)] = to_jsonable(v, key)
            else:
                out[str(k)] = to_jsonable(v, str(k))
        return out
    if isinstance(obj, (set, frozenset)):
        return [to_jsonable(x, key) for x in sorted(obj)]
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(x, key) for x in obj]
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def vector_strings(v) -> list[str] | None:
    return None if v is None else [rational_str(x) for x in v]


def verdict_to_dict(verdict) -> dict:
    return {
        "herdable": verdict.herdable,
        "method": verdict.method,
        "primal_certificate": vector_strings(verdict.primal_certificate),
        "dual_certificate": vector_strings(verdict.dual_certificate),
    }


def certificate_entry(verdict, leaders=None) -> dict:
    """A certificate for R(A, B), or for B built from 0-based ``leaders``."""
    kind = "primal" if verdict.herdable else "dual"
    vector = verdict.primal_certificate if verdict.herdable else verdict.dual_certificate
    return {
        "leaders": None if leaders is None else [l + 1 for l in leaders],
        "kind": kind,
        "method": verdict.method,
        "vector": vector_strings(vector),
    }


def new_report(command: str, pair: SystemPair) -> dict:
    return {
        "schema_version": SCHEMA_VERSION,
        "command": command,
        "model": {"name": pair.meta.get("name"), "n": pair.n, "m": pair.m},
        "verdict": None,
        "certificates": [],
    }


def dump_report(report: dict) -> str:
    return json.dumps(report, sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def load_report(text: str) -> dict:
    report = json.loads(text)
    if report.get("schema_version") != SCHEMA_VERSION:
        raise InvalidInputError(f"unsupported report schema {report.get('schema_version')!r}")
    return report


def _pair_for(pair: SystemPair, leaders) -> SystemPair:
    if leaders is None:
        return pair
    return SystemPair(pair.A, selection_matrix(pair.n, [l - 1 for l in leaders]))


def verify_report(report: dict, pair: SystemPair) -> list[str]:
    """Re-check every certificate and plan in ``report`` against ``pair``.

    Only matrix products and exact comparisons are used.  Returns a list
    of failure messages; empty means everything verified.
    """
    failures = []
    for idx, cert in enumerate(report.get("certificates", [])):
        where = f"certificates[{idx}]"
        try:
            target = _pair_for(pair, cert.get("leaders"))
            R = controllability_matrix(target)
            v = [to_rational(x) for x in cert["vector"]]
        except (InvalidInputError, KeyError, TypeError) as exc:
            failures.append(f"{where}: unreadable ({exc})")
            continue
        if cert["kind"] == "primal":
            ok = len(v) == R.ncols and all(x >= 1 for x in R.matvec(v))
        elif cert["kind"] == "dual":
            ok = len(v) == R.nrows and all(x >= 0 for x in v) and any(v) and not any(R.vecmat(v))
        else:
            ok = False
        if not ok:
            failures.append(f"{where}: {cert['kind']} certificate does not verify")

    plan = report.get("plan")
    if plan:
        try:
            x = [to_rational(s) for s in plan["x0"]]
            h = to_rational(plan["threshold"])
            for u in plan["inputs"]:
                ax = pair.A.matvec(x)
                bu = pair.B.matvec([to_rational(s) for s in u])
                x = [a + b for a, b in zip(ax, bu)]
            final = [to_rational(s) for s in plan["predicted_final_state"]]
        except (InvalidInputError, KeyError, TypeError) as exc:
            failures.append(f"plan: unreadable ({exc})")
        else:
            if x != final:
                failures.append("plan: simulated final state differs from the prediction")
            if not all(xi >= h for xi in x):
                failures.append("plan: final state is below the threshold")
    return failures
