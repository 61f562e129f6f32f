"""Tensor, mask, and manifest files.

Binary tensors: ``b"THOS"``, u32 version (1), u32 N, N x u64 dims, then the
float64 payload in mode-1-fastest order, all little-endian. Text tensors: a
header line ``N m_1 ... m_N`` followed by one value per line. Masks: a header
line ``N m_1 ... m_N |Omega|`` followed by one flat index per line, ascending.
"""
from __future__ import annotations

import struct
from pathlib import Path

import numpy as np

from .observation import ObservationMask
from .tensor_core import check_shape, vectorize

MAGIC = b"THOS"
VERSION = 1


def fmt_float(v: float) -> str:
    return f"{float(v):.17g}"


def write_tensor(path, t: np.ndarray, binary: bool = True) -> None:
    t = np.asarray(t, dtype=np.float64)
    path = Path(path)
    if binary:
        header = MAGIC + struct.pack("<II", VERSION, t.ndim) + struct.pack(f"<{t.ndim}Q", *t.shape)
        path.write_bytes(header + vectorize(t).astype("<f8").tobytes())
    else:
        lines = [" ".join(str(v) for v in (t.ndim, *t.shape))]
        lines += [fmt_float(v) for v in vectorize(t)]
        path.write_text("\n".join(lines) + "\n")


def read_tensor(path) -> np.ndarray:
    """Read either tensor format, detected from the leading magic bytes."""
    raw = Path(path).read_bytes()
    if raw[:4] == MAGIC:
        version, ndim = struct.unpack_from("<II", raw, 4)
        if version != VERSION:
            raise ValueError(f"unsupported tensor file version {version}")
        shape = check_shape(struct.unpack_from(f"<{ndim}Q", raw, 12))
        offset = 12 + 8 * ndim
        count = int(np.prod(shape))
        if len(raw) - offset != 8 * count:
            raise ValueError("tensor payload length does not match its header")
        data = np.frombuffer(raw, dtype="<f8", count=count, offset=offset)
        return data.astype(np.float64).reshape(shape, order="F")
    lines = raw.decode("utf-8").split()
    ndim = int(lines[0])
    shape = check_shape(int(v) for v in lines[1 : 1 + ndim])
    data = np.array([float(v) for v in lines[1 + ndim :]])
    if data.size != int(np.prod(shape)):
        raise ValueError("tensor value count does not match its header")
    return data.reshape(shape, order="F")


def write_mask(path, mask: ObservationMask) -> None:
    head = " ".join(str(v) for v in (len(mask.shape), *mask.shape, len(mask)))
    body = "\n".join(str(i) for i in mask.indices)
    Path(path).write_text(head + "\n" + (body + "\n" if len(mask) else ""))


def read_mask(path) -> ObservationMask:
    tokens = Path(path).read_text().split()
    ndim = int(tokens[0])
    shape = tuple(int(v) for v in tokens[1 : 1 + ndim])
    count = int(tokens[1 + ndim])
    idx = np.array([int(v) for v in tokens[2 + ndim :]], dtype=np.int64)
    if idx.size != count:
        raise ValueError("mask index count does not match its header")
    return ObservationMask(shape, idx)


def write_manifest(path, spec) -> None:
    """Sidecar text for a generated instance (family, shape, ranks, seed)."""
    lines = [
        f"family = {spec.family.value}",
        "shape = " + ", ".join(map(str, spec.shape)),
        "ranks = " + ", ".join(map(str, spec.ranks)),
        f"seed = {spec.seed}",
        f"orthonormalize_factors = {str(spec.orthonormalize_factors).lower()}",
    ]
    Path(path).write_text("\n".join(lines) + "\n")


def read_manifest(path):
    from .synthetic import GeneratorSpec

    kv = dict(
        (k.strip(), v.strip())
        for k, v in (line.split("=", 1) for line in Path(path).read_text().splitlines() if "=" in line)
    )
    return GeneratorSpec(
        family=kv["family"],
        shape=tuple(int(v) for v in kv["shape"].split(",")),
        ranks=tuple(int(v) for v in kv["ranks"].split(",")),
        seed=int(kv["seed"]),
        orthonormalize_factors=kv.get("orthonormalize_factors", "true") == "true",
    )
