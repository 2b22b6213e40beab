"""Binary model persistence.

Layout (little-endian):
    magic  "CHLF"
    u32    format version (1)
    u32    num_inputs, u32 num_blocks, u32 num_outputs
    u64    parameter count
    f64[]  parameters flattened in PARAM_FIELDS order, C-contiguous
    u32    CRC-32 of everything after the magic and before the checksum

Round trips are bit-exact for all finite parameter values.
"""

from __future__ import annotations

import struct
import zlib

import numpy as np

from .errors import ChecksumMismatch, VersionMismatch
from .network import NetworkConfig, NetworkParams, init_params

MAGIC = b"CHLF"
VERSION = 1
_HEADER = struct.Struct("<IIIIQ")  # version, inputs, blocks, outputs, count


def serialize_model(params: NetworkParams) -> bytes:
    flat = np.ascontiguousarray(params.flatten(), dtype="<f8")
    body = _HEADER.pack(VERSION, params.num_inputs, params.num_blocks,
                        params.num_outputs, flat.size) + flat.tobytes()
    return MAGIC + body + struct.pack("<I", zlib.crc32(body))


def deserialize_model(data: bytes) -> NetworkParams:
    if len(data) < len(MAGIC) + _HEADER.size + 4:
        raise ChecksumMismatch("file too short")
    if data[:4] != MAGIC:
        raise VersionMismatch("bad magic")
    body, (checksum,) = data[4:-4], struct.unpack("<I", data[-4:])
    if zlib.crc32(body) != checksum:
        raise ChecksumMismatch("CRC-32 does not validate")
    version, n_in, n_b, n_out, count = _HEADER.unpack(body[: _HEADER.size])
    if version != VERSION:
        raise VersionMismatch(f"unsupported version {version}")
    payload = body[_HEADER.size :]
    if len(payload) != 8 * count:
        raise ChecksumMismatch("payload length does not match header count")
    template = init_params(NetworkConfig(num_inputs=n_in, num_blocks=n_b,
                                         num_outputs=n_out, init_scale=0.0))
    flat = np.frombuffer(payload, dtype="<f8").astype(np.float64)
    if flat.size != template.size():
        raise ChecksumMismatch("header count inconsistent with layer sizes")
    return template.with_flat(flat)


def save_model(path: str, params: NetworkParams):
    with open(path, "wb") as fh:
        fh.write(serialize_model(params))


def load_model(path: str) -> NetworkParams:
    with open(path, "rb") as fh:
        return deserialize_model(fh.read())
