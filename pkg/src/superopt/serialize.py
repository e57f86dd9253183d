"""JSON encoding for RatFun, RatMat and thematic data.

Complex numbers are ``[re, im]`` pairs (a bare real is also accepted on
input).  A point at infinity is the string ``"inf"``.  The zero function
encodes as the string ``"0"``.
"""
from __future__ import annotations

import json
import math

from .errors import InvalidFunction, ShapeError
from .ratfun import RatFun

SCHEMA = "superopt/1"


def _num(x, where="value"):
    if isinstance(x, (int, float)):
        return complex(x)
    if isinstance(x, str):
        try:
            return complex(x.replace(" ", ""))
        except ValueError:
            raise InvalidFunction(f"{where}: cannot parse number {x!r}") from None
    if isinstance(x, (list, tuple)) and len(x) == 2:
        return complex(float(x[0]), float(x[1]))
    raise InvalidFunction(f"{where}: expected number or [re, im], got {x!r}")


def complex_to_json(c):
    c = complex(c)
    return [_clean(c.real), _clean(c.imag)]


def _clean(x):
    x = float(x)
    return 0.0 if x == 0 else x


def _roots_from_json(items, where):
    out = []
    for k, item in enumerate(items):
        if isinstance(item, (list, tuple)) and item and item[0] == "inf":
            # ["inf"] or ["inf", mult]
            mult = int(item[1]) if len(item) > 1 else 1
            if len(item) > 2 or mult < 1:
                raise InvalidFunction(f"{where}[{k}]: expected ['inf', mult]")
            out.append(("inf", mult))
            continue
        if not isinstance(item, (list, tuple)) or len(item) not in (2, 3):
            raise InvalidFunction(f"{where}[{k}]: expected [re, im] or [re, im, mult]")
        mult = int(item[2]) if len(item) == 3 else 1
        if mult < 1:
            raise InvalidFunction(f"{where}[{k}]: multiplicity must be positive")
        out.append((complex(float(item[0]), float(item[1])), mult))
    return out


def ratfun_from_json(obj):
    """Decode a RatFun from its JSON form."""
    if isinstance(obj, RatFun):
        return obj
    if obj == "0" or obj == 0:
        return RatFun.zero()
    if isinstance(obj, (int, float, list)) or (isinstance(obj, str)):
        return RatFun.const(_num(obj))
    if not isinstance(obj, dict):
        raise InvalidFunction(f"expected RatFun object, got {type(obj).__name__}")
    if "num" in obj:
        num = [_num(c, "num") for c in obj["num"]]
        den = [_num(c, "den") for c in obj.get("den", [1.0])]
        return RatFun.from_coeffs(num, den)
    if "gain" in obj:
        zeros = _roots_from_json(obj.get("zeros", []), "zeros")
        poles = _roots_from_json(obj.get("poles", []), "poles")
        fz = [(a, m) for a, m in zeros if a != "inf"]
        fp = [(b, m) for b, m in poles if b != "inf"]
        f = RatFun(_num(obj["gain"], "gain"), fz, fp)
        # Entries at infinity are redundant; when present they must agree.
        zi = sum(m for a, m in zeros if a == "inf")
        pi = sum(m for b, m in poles if b == "inf")
        if zi or pi:
            if f.order_at_inf != zi - pi:
                raise InvalidFunction(
                    f"stated order at infinity {zi - pi} disagrees with implied {f.order_at_inf}")
        return f
    raise InvalidFunction("RatFun object needs 'num'/'den' or 'gain'/'zeros'/'poles'")


def ratfun_to_json(f):
    if f.is_zero:
        return "0"
    out = {
        "gain": complex_to_json(f.gain),
        "zeros": [complex_to_json(a) + [m] for a, m in f.zeros],
        "poles": [complex_to_json(b) + [m] for b, m in f.poles],
    }
    k = f.order_at_inf
    if k > 0:
        out["zeros"].append(["inf", k])
    elif k < 0:
        out["poles"].append(["inf", -k])
    return out


def ratmat_from_json(obj):
    from .ratmat import RatMat

    if not isinstance(obj, dict) or "entries" not in obj:
        raise InvalidFunction("RatMat object needs 'entries'")
    entries = [[ratfun_from_json(x) for x in row] for row in obj["entries"]]
    A = RatMat(entries)
    rows, cols = obj.get("rows", A.shape[0]), obj.get("cols", A.shape[1])
    if (rows, cols) != A.shape:
        raise ShapeError(f"declared shape {(rows, cols)} but entries are {A.shape}")
    return A


def ratmat_to_json(A):
    m, n = A.shape
    return {"rows": m, "cols": n,
            "entries": [[ratfun_to_json(A[i, j]) for j in range(n)] for i in range(m)]}


def thematic_from_json(obj):
    from .thematic import ThematicData

    try:
        return ThematicData(
            t0=float(obj["t0"]), t1=float(obj.get("t1", obj["t0"])),
            u0=ratfun_from_json(obj["u0"]), u1=ratfun_from_json(obj["u1"]),
            v=tuple(ratfun_from_json(x) for x in obj["v"]),
            w=tuple(ratfun_from_json(x) for x in obj["w"]),
        )
    except KeyError as exc:
        raise InvalidFunction(f"thematic spec missing field {exc.args[0]!r}") from None


def thematic_to_json(th):
    return {"t0": th.t0, "t1": th.t1,
            "u0": ratfun_to_json(th.u0), "u1": ratfun_to_json(th.u1),
            "v": [ratfun_to_json(x) for x in th.v],
            "w": [ratfun_to_json(x) for x in th.w]}


def load_any(obj):
    """Decode a top-level document: RatMat, thematic spec or RatFun."""
    if isinstance(obj, dict) and "entries" in obj:
        return ratmat_from_json(obj)
    if isinstance(obj, dict) and "u0" in obj:
        return thematic_from_json(obj)
    return ratfun_from_json(obj)


def _default(o):
    if isinstance(o, complex):
        return complex_to_json(o)
    if hasattr(o, "item"):
        return o.item()
    if isinstance(o, RatFun):
        return ratfun_to_json(o)
    raise TypeError(f"not JSON serializable: {type(o).__name__}")


def _finite(o):
    if isinstance(o, float) and not math.isfinite(o):
        return "inf" if o > 0 else "-inf"
    if isinstance(o, dict):
        return {k: _finite(v) for k, v in o.items()}
    if isinstance(o, (list, tuple)):
        return [_finite(v) for v in o]
    return o


def dumps(obj):
    """Deterministic JSON text."""
    return json.dumps(_finite(obj), sort_keys=True, default=_default, indent=2)
