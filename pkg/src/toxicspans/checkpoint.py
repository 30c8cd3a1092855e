"""Binary checkpoint container.

Layout (all integers little-endian)::

    offset  size  content
    0       8     magic b"TXSPCKPT"
    8       4     format version, uint32 (currently 1)
    12      8     header length N in bytes, uint64
    20      N     UTF-8 JSON header, keys sorted
    20+N    ...   tensor data, C order, little-endian, back to back

The header holds ``encoder_config``, ``train_config`` (including the seed),
``epoch``, ``trial_f1``, ``vocab_fingerprint``, ``history`` and a
``tensors`` list of ``{name, dtype, shape, offset, nbytes}`` entries whose
offsets are relative to the start of the tensor data. ``dtype`` is a numpy
type string such as ``"<f4"``.
"""

from __future__ import annotations

import json
import struct
from pathlib import Path

import numpy as np

from .encoder import EncoderConfig, parameter_shapes
from .training import Checkpoint, TrainConfig

__all__ = ["FORMAT_VERSION", "MAGIC", "CheckpointError", "load_checkpoint", "save_checkpoint"]

MAGIC = b"TXSPCKPT"
FORMAT_VERSION = 1
_PREFIX = struct.Struct("<8sIQ")


class CheckpointError(ValueError):
    pass


def _to_bytes(ckpt: Checkpoint) -> bytes:
    tensors, blobs, offset = [], [], 0
    for name, value in ckpt.params.items():
        arr = np.ascontiguousarray(value, dtype=value.dtype.newbyteorder("<"))
        blob = arr.tobytes()
        tensors.append({"name": name, "dtype": arr.dtype.str, "shape": list(arr.shape),
                        "offset": offset, "nbytes": len(blob)})
        blobs.append(blob)
        offset += len(blob)
    header = {
        "encoder_config": ckpt.encoder_config.to_dict(),
        "train_config": ckpt.train_config.to_dict(),
        "epoch": ckpt.epoch,
        "trial_f1": ckpt.trial_f1,
        "vocab_fingerprint": ckpt.vocab_fingerprint,
        "history": ckpt.history,
        "tensors": tensors,
    }
    raw = json.dumps(header, sort_keys=True, separators=(",", ":")).encode("utf-8")
    return _PREFIX.pack(MAGIC, FORMAT_VERSION, len(raw)) + raw + b"".join(blobs)


def save_checkpoint(path: str | Path, ckpt: Checkpoint) -> None:
    Path(path).write_bytes(_to_bytes(ckpt))


def load_checkpoint(path: str | Path) -> Checkpoint:
    data = Path(path).read_bytes()
    if len(data) < _PREFIX.size:
        raise CheckpointError(f"{path}: file too short for a checkpoint")
    magic, version, header_len = _PREFIX.unpack_from(data)
    if magic != MAGIC:
        raise CheckpointError(f"{path}: not a checkpoint (bad magic {magic!r})")
    if version != FORMAT_VERSION:
        raise CheckpointError(f"{path}: unsupported checkpoint version {version}")
    start = _PREFIX.size + header_len
    header = json.loads(data[_PREFIX.size:start].decode("utf-8"))

    config = EncoderConfig.from_dict(header["encoder_config"])
    expected = parameter_shapes(config)
    params = {}
    for t in header["tensors"]:
        lo = start + t["offset"]
        if lo + t["nbytes"] > len(data):
            raise CheckpointError(f"{path}: tensor {t['name']} truncated")
        arr = np.frombuffer(data, dtype=np.dtype(t["dtype"]), count=int(np.prod(t["shape"])), offset=lo)
        params[t["name"]] = arr.reshape(t["shape"]).astype(arr.dtype.newbyteorder("="))
    if {k: tuple(v.shape) for k, v in params.items()} != expected:
        raise CheckpointError(f"{path}: tensors do not match the stored encoder config")
    return Checkpoint(
        params=params,
        encoder_config=config,
        train_config=TrainConfig(**header["train_config"]),
        epoch=header["epoch"],
        trial_f1=header["trial_f1"],
        vocab_fingerprint=header["vocab_fingerprint"],
        history=header["history"],
    )
