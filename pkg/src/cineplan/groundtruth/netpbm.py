"""Byte-exact Netpbm (PGM/PPM) and PFM image encoding and decoding.

These formats carry every exported conditioning image, chosen because they
are implementable from scratch in any language and their bytes are fully
specified, so golden-file tests stay portable:

* PGM ``P5`` maxval 255 (masks) or 65535 with big-endian samples
  (normalized depth);
* PPM ``P6`` maxval 255 (pose maps, id-color previews);
* PFM ``Pf`` with scale -1.0, meaning little-endian float32 samples,
  rows stored bottom-to-top per the format convention (metric depth).
"""

from __future__ import annotations

import numpy as np

from ..errors import SchemaError


def encode_pgm8(image: np.ndarray) -> bytes:
    a = np.ascontiguousarray(image, dtype=np.uint8)
    if a.ndim != 2:
        raise ValueError("pgm8 wants a (H, W) array")
    h, w = a.shape
    return b"P5\n%d %d\n255\n" % (w, h) + a.tobytes()


def encode_pgm16(image: np.ndarray) -> bytes:
    a = np.ascontiguousarray(image, dtype=np.uint16)
    if a.ndim != 2:
        raise ValueError("pgm16 wants a (H, W) array")
    h, w = a.shape
    return b"P5\n%d %d\n65535\n" % (w, h) + a.astype(">u2").tobytes()


def encode_ppm(image: np.ndarray) -> bytes:
    a = np.ascontiguousarray(image, dtype=np.uint8)
    if a.ndim != 3 or a.shape[2] != 3:
        raise ValueError("ppm wants a (H, W, 3) array")
    h, w = a.shape[:2]
    return b"P6\n%d %d\n255\n" % (w, h) + a.tobytes()


def encode_pfm(image: np.ndarray) -> bytes:
    a = np.ascontiguousarray(image, dtype=np.float32)
    if a.ndim != 2:
        raise ValueError("pfm wants a (H, W) grayscale array")
    h, w = a.shape
    # scale -1.0 marks little-endian; PFM rows run bottom-to-top
    return b"Pf\n%d %d\n-1.0\n" % (w, h) + a[::-1].astype("<f4").tobytes()


def _read_token(data: bytes, pos: int) -> tuple[bytes, int]:
    n = len(data)
    while pos < n:
        c = data[pos:pos + 1]
        if c == b"#":
            while pos < n and data[pos:pos + 1] != b"\n":
                pos += 1
        elif c.isspace():
            pos += 1
        else:
            break
    start = pos
    while pos < n and not data[pos:pos + 1].isspace():
        pos += 1
    if start == pos:
        raise SchemaError("truncated Netpbm header")
    return data[start:pos], pos


def decode_pnm(data: bytes) -> np.ndarray:
    """Decode P5 (8- or 16-bit) into (H, W) or P6 into (H, W, 3) uint arrays."""
    magic, pos = _read_token(data, 0)
    if magic not in (b"P5", b"P6"):
        raise SchemaError(f"unsupported Netpbm magic {magic!r}")
    w_tok, pos = _read_token(data, pos)
    h_tok, pos = _read_token(data, pos)
    max_tok, pos = _read_token(data, pos)
    try:
        w, h, maxval = int(w_tok), int(h_tok), int(max_tok)
    except ValueError:
        raise SchemaError("malformed Netpbm dimensions")
    pos += 1  # single whitespace byte after maxval
    channels = 3 if magic == b"P6" else 1
    if maxval == 255:
        dtype, itemsize = np.uint8, 1
    elif maxval == 65535 and magic == b"P5":
        dtype, itemsize = np.dtype(">u2"), 2
    else:
        raise SchemaError(f"unsupported maxval {maxval}")
    need = w * h * channels * itemsize
    raw = data[pos:pos + need]
    if len(raw) != need:
        raise SchemaError(f"Netpbm body has {len(raw)} bytes, expected {need}")
    a = np.frombuffer(raw, dtype=dtype)
    a = a.astype(np.uint16) if itemsize == 2 else a.copy()
    return a.reshape((h, w, 3) if channels == 3 else (h, w))


def decode_pfm(data: bytes) -> np.ndarray:
    magic, pos = _read_token(data, 0)
    if magic != b"Pf":
        raise SchemaError(f"unsupported PFM magic {magic!r} (grayscale Pf only)")
    w_tok, pos = _read_token(data, pos)
    h_tok, pos = _read_token(data, pos)
    scale_tok, pos = _read_token(data, pos)
    try:
        w, h, scale = int(w_tok), int(h_tok), float(scale_tok)
    except ValueError:
        raise SchemaError("malformed PFM header")
    pos += 1
    need = w * h * 4
    raw = data[pos:pos + need]
    if len(raw) != need:
        raise SchemaError(f"PFM body has {len(raw)} bytes, expected {need}")
    dtype = "<f4" if scale < 0 else ">f4"
    a = np.frombuffer(raw, dtype=dtype).reshape((h, w)).astype(np.float32)
    return a[::-1]


def write_bytes(path, data: bytes) -> None:
    with open(path, "wb") as fh:
        fh.write(data)


def read_pnm(path) -> np.ndarray:
    with open(path, "rb") as fh:
        return decode_pnm(fh.read())


def read_pfm(path) -> np.ndarray:
    with open(path, "rb") as fh:
        return decode_pfm(fh.read())
