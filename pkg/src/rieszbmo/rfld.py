"""RFLD v1 field files.

Layout: one JSON header line ``{"magic":"RFLD","version":1,"n":..,"N":..,"L":..}``
terminated by ``\\n``, then ``N**n`` little-endian float64 values in
row-major order.
"""

import json
from pathlib import Path

import numpy as np

from .grid import GridSpec, ScalarField

MAGIC = "RFLD"
VERSION = 1


class RFLDError(ValueError):
    pass


def dumps(f: ScalarField) -> bytes:
    s = f.spec
    header = json.dumps({"magic": MAGIC, "version": VERSION, "n": s.n, "N": s.N, "L": s.L}, separators=(",", ":"))
    return header.encode("ascii") + b"\n" + np.ascontiguousarray(f.values, dtype="<f8").tobytes()


def loads(buf: bytes) -> ScalarField:
    nl = buf.find(b"\n")
    if nl < 0:
        raise RFLDError("missing header line")
    try:
        hdr = json.loads(buf[:nl].decode("ascii"))
    except (UnicodeDecodeError, json.JSONDecodeError) as e:
        raise RFLDError(f"malformed header: {e}") from None
    if not isinstance(hdr, dict) or hdr.get("magic") != MAGIC:
        raise RFLDError("not an RFLD file")
    if hdr.get("version") != VERSION:
        raise RFLDError(f"unsupported RFLD version {hdr.get('version')!r}")
    try:
        spec = GridSpec(hdr["n"], hdr["N"], hdr["L"])
    except (KeyError, TypeError, ValueError) as e:
        raise RFLDError(f"bad grid in header: {e}") from None
    payload = buf[nl + 1:]
    if len(payload) != 8 * spec.size:
        raise RFLDError(f"payload has {len(payload)} bytes, expected {8 * spec.size}")
    vals = np.frombuffer(payload, dtype="<f8").reshape(spec.shape)
    try:
        return ScalarField(spec, vals)
    except ValueError as e:
        raise RFLDError(str(e)) from None


def write_rfld(path, f: ScalarField) -> Path:
    path = Path(path)
    path.write_bytes(dumps(f))
    return path


def read_rfld(path) -> ScalarField:
    return loads(Path(path).read_bytes())
