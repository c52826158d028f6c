"""Binary checkpoint format.

Layout (little-endian throughout):

    magic   "MTRX"                                  4 bytes
    payload:
        version      u32   (currently 1)
        n            u32
        L            f64
        params       6 x f64  (alpha, qbar, epsilon, qhat, mu, eta)
        time         f64
        6 planes     n*n f64 row-major: u_x, u_y, v_x, v_y, T_e, q_e
    crc32(payload)   u32

Round trips are bit-exact; any corruption is rejected before a state is built.
"""

from __future__ import annotations

import struct
import zlib

import numpy as np

from .errors import CheckpointError, UnsupportedVersion
from .model import ModelParams, State
from .spectral import Field, Grid, VectorField

MAGIC = b"MTRX"
VERSION = 1
_HEAD = struct.Struct("<IId6dd")  # version, n, L, params, time


def checkpoint_write(s: State, p: ModelParams, path) -> None:
    g = s.grid
    head = _HEAD.pack(VERSION, g.n, g.length,
                      p.alpha, p.qbar, p.epsilon, p.qhat, p.mu, p.eta,
                      s.time)
    planes = (s.u.x, s.u.y, s.v.x, s.v.y, s.T_e, s.q_e)
    payload = head + b"".join(f.values.astype("<f8").tobytes() for f in planes)
    with open(path, "wb") as fh:
        fh.write(MAGIC)
        fh.write(payload)
        fh.write(struct.pack("<I", zlib.crc32(payload)))


def _read_payload(path) -> bytes:
    with open(path, "rb") as fh:
        blob = fh.read()
    if len(blob) < len(MAGIC) + _HEAD.size + 4:
        raise CheckpointError(f"truncated checkpoint {path}")
    if blob[:4] != MAGIC:
        raise CheckpointError(f"bad magic in {path}: {blob[:4]!r}")
    payload, (crc,) = blob[4:-4], struct.unpack("<I", blob[-4:])
    if zlib.crc32(payload) != crc:
        raise CheckpointError(f"CRC mismatch in {path}")
    return payload


def checkpoint_header(path) -> dict:
    """Parse and return the header only (used by the inspect command)."""
    payload = _read_payload(path)
    version, n, L, alpha, qbar, eps, qhat, mu, eta, time = _HEAD.unpack(
        payload[:_HEAD.size])
    if version != VERSION:
        raise UnsupportedVersion(f"checkpoint version {version}, expected {VERSION}")
    return {"version": version, "n": n, "length": L, "alpha": alpha,
            "qbar": qbar, "epsilon": eps, "qhat": qhat, "mu": mu, "eta": eta,
            "time": time}


def checkpoint_read(path) -> tuple[State, ModelParams]:
    payload = _read_payload(path)
    h = checkpoint_header(path)
    n = h["n"]
    expect = _HEAD.size + 6 * n * n * 8
    if len(payload) != expect:
        raise CheckpointError(
            f"payload size {len(payload)} != expected {expect} for n={n}")
    grid = Grid(n, h["length"])
    raw = np.frombuffer(payload, dtype="<f8", offset=_HEAD.size)
    planes = [raw[i * n * n:(i + 1) * n * n].reshape(n, n).astype(np.float64)
              for i in range(6)]
    state = State(
        u=VectorField(Field(grid, planes[0]), Field(grid, planes[1])),
        v=VectorField(Field(grid, planes[2]), Field(grid, planes[3])),
        T_e=Field(grid, planes[4]),
        q_e=Field(grid, planes[5]),
        time=h["time"],
    )
    params = ModelParams(alpha=h["alpha"], qbar=h["qbar"], epsilon=h["epsilon"],
                         qhat=h["qhat"], mu=h["mu"], eta=h["eta"])
    return state, params
