"""Field snapshot formats.

CSV: first line ``# nx ny Lx Ly`` then one ``re,im`` line per grid node, row-major.

Binary: 32-byte little-endian header (magic ``VLAB``, uint32 version, uint32 nx,
uint32 ny, float64 Lx, float64 Ly) followed by nx*ny (re, im) float64 pairs.
"""
from __future__ import annotations

import os
import struct
import tempfile
from pathlib import Path

import numpy as np

MAGIC = b"VLAB"
VERSION = 1
_HEADER = struct.Struct("<4sIIIdd")
assert _HEADER.size == 32


def atomic_write(path, data: bytes | str) -> None:
    """Write via a temporary file in the same directory, then rename."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    mode = "wb" if isinstance(data, bytes) else "w"
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.")
    try:
        with os.fdopen(fd, mode) as fh:
            fh.write(data)
        umask = os.umask(0)
        os.umask(umask)
        os.chmod(tmp, 0o666 & ~umask)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def dumps_csv(field, Lx: float, Ly: float) -> str:
    field = np.asarray(field, dtype=complex)
    nx, ny = field.shape
    lines = [f"# {nx} {ny} {float(Lx)!r} {float(Ly)!r}"]
    flat = field.ravel(order="C")
    lines += [f"{re!r},{im!r}" for re, im in zip(flat.real.tolist(), flat.imag.tolist())]
    return "\n".join(lines) + "\n"


def loads_csv(text: str):
    rows = text.splitlines()
    head = rows[0].lstrip("#").split()
    if len(head) != 4:
        raise ValueError("CSV header must read '# nx ny Lx Ly'")
    nx, ny = int(head[0]), int(head[1])
    Lx, Ly = float(head[2]), float(head[3])
    body = [r for r in rows[1:] if r.strip()]
    if len(body) != nx * ny:
        raise ValueError(f"expected {nx * ny} rows, found {len(body)}")
    vals = np.array([[float(t) for t in r.split(",")] for r in body])
    return (vals[:, 0] + 1j * vals[:, 1]).reshape(nx, ny), Lx, Ly


def dumps_binary(field, Lx: float, Ly: float) -> bytes:
    field = np.asarray(field, dtype=complex)
    nx, ny = field.shape
    head = _HEADER.pack(MAGIC, VERSION, nx, ny, float(Lx), float(Ly))
    body = np.ascontiguousarray(field).astype("<c16").tobytes()
    return head + body


def loads_binary(data: bytes):
    magic, version, nx, ny, Lx, Ly = _HEADER.unpack_from(data, 0)
    if magic != MAGIC:
        raise ValueError("not a VLAB field file")
    if version != VERSION:
        raise ValueError(f"unsupported VLAB version {version}")
    body = np.frombuffer(data, dtype="<c16", offset=_HEADER.size)
    if body.size != nx * ny:
        raise ValueError("truncated VLAB field file")
    return body.reshape(nx, ny).astype(complex), Lx, Ly


def save_field(path, field, Lx, Ly):
    path = Path(path)
    if path.suffix == ".csv":
        atomic_write(path, dumps_csv(field, Lx, Ly))
    else:
        atomic_write(path, dumps_binary(field, Lx, Ly))


def load_field(path):
    path = Path(path)
    if path.suffix == ".csv":
        return loads_csv(path.read_text())
    return loads_binary(path.read_bytes())
