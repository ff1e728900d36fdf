"""Canonical JSON encoding and matrix parsing for the command-line front end.

Machine output is versioned ("schema": 1), complex scalars are emitted as
{re, im} objects, matrices as row-major nested arrays, and every float is
rendered with a fixed 17-significant-digit format with negative zero
normalized, so identical invocations produce byte-identical artifacts.
"""

import json

import numpy as np

from .fock import FockVector

SCHEMA_VERSION = 1

_BARE_CHARS = set("0123456789.eE+-ij")
_DELIMS = set('[]{},:" \t\r\n')


class _Float:
    """Marker for a float that must be rendered with the canonical format."""

    def __init__(self, value):
        self.value = float(value)


def fmt_float(x):
    """17-significant-digit decimal text with -0.0 normalized to 0.0."""
    x = float(x)
    if not np.isfinite(x):
        raise ValueError("non-finite value has no canonical JSON encoding")
    if x == 0.0:
        x = 0.0
    return format(x, ".17g")


def encode_complex(z):
    z = complex(z)
    return {"re": _Float(z.real), "im": _Float(z.imag)}


def encode_matrix(m):
    """Row-major nested array with {re, im} entries."""
    m = np.asarray(m)
    if m.ndim == 1:
        return [encode_complex(v) for v in m]
    return [[encode_complex(v) for v in row] for row in m]


def encode_fock_vector(vec):
    assert isinstance(vec, FockVector)
    entries = []
    for alpha, c in zip(vec.space.indices, vec.coeffs):
        entries.append({
            "multi_index": [int(a) for a in alpha],
            "re": _Float(complex(c).real),
            "im": _Float(complex(c).imag),
        })
    return {"degree_cap": vec.space.degree_cap, "entries": entries}


def to_jsonable(obj):
    """Normalize nested python/numpy containers for the canonical writer."""
    if isinstance(obj, _Float) or obj is None or isinstance(obj, (bool, str)):
        return obj
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        return _Float(obj)
    if isinstance(obj, (complex, np.complexfloating)):
        return encode_complex(obj)
    if isinstance(obj, FockVector):
        return encode_fock_vector(obj)
    if isinstance(obj, np.ndarray):
        return to_jsonable(encode_matrix(obj))
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    raise TypeError(f"cannot serialize object of type {type(obj).__name__}")


def _is_scalar(x):
    return x is None or isinstance(x, (bool, str, int, _Float))


def _is_inline(x):
    if _is_scalar(x):
        return True
    if isinstance(x, dict):
        return all(_is_scalar(v)
                   or (isinstance(v, list) and all(_is_scalar(e) for e in v))
                   for v in x.values())
    if isinstance(x, list):
        return all(_is_scalar(e) or isinstance(e, dict) and _is_inline(e)
                   for e in x)
    return False


def _write(x, out, pad, step):
    if x is None:
        out.append("null")
    elif isinstance(x, bool):
        out.append("true" if x else "false")
    elif isinstance(x, _Float):
        out.append(fmt_float(x.value))
    elif isinstance(x, int):
        out.append(str(x))
    elif isinstance(x, str):
        out.append(json.dumps(x))
    elif isinstance(x, dict):
        if not x:
            out.append("{}")
        elif _is_inline(x):
            out.append("{")
            for i, (k, v) in enumerate(x.items()):
                if i:
                    out.append(", ")
                out.append(json.dumps(str(k)) + ": ")
                _write(v, out, pad, step)
            out.append("}")
        else:
            inner = pad + " " * step
            out.append("{\n")
            for i, (k, v) in enumerate(x.items()):
                if i:
                    out.append(",\n")
                out.append(inner + json.dumps(str(k)) + ": ")
                _write(v, out, inner, step)
            out.append("\n" + pad + "}")
    elif isinstance(x, list):
        if not x:
            out.append("[]")
        elif _is_inline(x):
            out.append("[")
            for i, v in enumerate(x):
                if i:
                    out.append(", ")
                _write(v, out, pad, step)
            out.append("]")
        else:
            inner = pad + " " * step
            out.append("[\n")
            for i, v in enumerate(x):
                if i:
                    out.append(",\n")
                out.append(inner)
                _write(v, out, inner, step)
            out.append("\n" + pad + "]")
    else:
        raise TypeError(f"unexpected type {type(x).__name__} in canonical writer")


def dumps(obj, indent=2):
    """Deterministic JSON text for a normalized object tree."""
    out = []
    _write(to_jsonable(obj), out, "", indent)
    return "".join(out)


# ---------------------------------------------------------------------------
# parsing of matrices and scalars from command-line text
# ---------------------------------------------------------------------------

def _quote_bare_complex(text):
    """Quote bare complex literals (i, -i, 1+2i, ...) so json accepts them."""
    out = []
    token = []
    in_string = False
    for ch in text + "\0":
        if in_string:
            out.append(ch)
            if ch == '"':
                in_string = False
            continue
        if ch not in _DELIMS and ch != "\0":
            token.append(ch)
            continue
        if token:
            t = "".join(token)
            if ("i" in t or "j" in t) and set(t) <= _BARE_CHARS:
                out.append(json.dumps(t))
            else:
                out.append(t)
            token = []
        if ch == '"':
            in_string = True
        if ch != "\0":
            out.append(ch)
    return "".join(out)


def parse_scalar(v):
    """One complex entry: number, 'a+bi' text, {re, im}, or [re, im]."""
    if isinstance(v, bool):
        raise ValueError("boolean is not a matrix entry")
    if isinstance(v, (int, float)):
        return complex(v)
    if isinstance(v, str):
        s = v.replace(" ", "").replace("i", "j")
        return complex(s)
    if isinstance(v, dict):
        keys = set(v)
        if not keys <= {"re", "im"}:
            raise ValueError(f"unexpected keys {sorted(keys)} in complex object")
        return complex(float(v.get("re", 0.0)), float(v.get("im", 0.0)))
    if (isinstance(v, list) and len(v) == 2
            and all(isinstance(e, (int, float)) and not isinstance(e, bool)
                    for e in v)):
        return complex(float(v[0]), float(v[1]))
    raise ValueError(f"cannot parse matrix entry {v!r}")


def parse_matrix(text):
    """Parse a square complex matrix from relaxed-JSON command-line text."""
    try:
        data = json.loads(_quote_bare_complex(text))
    except json.JSONDecodeError as exc:
        raise ValueError(f"matrix text is not valid JSON: {exc}") from exc
    if not isinstance(data, list) or not data:
        raise ValueError("matrix must be a non-empty array of rows")
    if not isinstance(data[0], list):
        data = [data]
    rows = []
    width = None
    for row in data:
        if not isinstance(row, list):
            raise ValueError("matrix rows must be arrays")
        entries = [parse_scalar(v) for v in row]
        if width is None:
            width = len(entries)
        elif len(entries) != width:
            raise ValueError("matrix rows have unequal lengths")
        rows.append(entries)
    return np.array(rows, dtype=complex)


def parse_basis_vector(text, dim):
    """A vector in C^dim from 'e<k>', an index, or an explicit entry list."""
    s = text.strip()
    if s.startswith("e") and s[1:].isdigit():
        k = int(s[1:])
    elif s.lstrip("+-").isdigit():
        k = int(s)
    else:
        try:
            data = json.loads(_quote_bare_complex(s))
        except json.JSONDecodeError as exc:
            raise ValueError(f"cannot parse vector {text!r}") from exc
        if not isinstance(data, list):
            raise ValueError(f"cannot parse vector {text!r}")
        vec = np.array([parse_scalar(v) for v in data], dtype=complex)
        if vec.shape != (dim,):
            raise ValueError(f"vector has length {vec.shape[0]}, expected {dim}")
        return vec
    if not 0 <= k < dim:
        raise ValueError(f"basis index {k} out of range for dimension {dim}")
    vec = np.zeros(dim, dtype=complex)
    vec[k] = 1.0
    return vec
