"""Binary dataset files for experience buffers.

Layout (integers little-endian):

    magic b"OWB1" | version u16 | env u8 | grid_size u8 | K u8 | C u8 |
    H u16 | W u16 | N u32 | T u32 | prov_len u32 | provenance utf-8

    per episode:
        attributes  K*2 u8
        observations (T+1)*H*W*C u8
        actions     T*2 u8            (sentinel 255,255 = no action)
        states      grid: (T+1)*K*2 u8 | bodies: (T+1)*K*5 f64
"""

from __future__ import annotations

import struct
from dataclasses import dataclass

import numpy as np

from .buffer import Episode, ExperienceBuffer

MAGIC = b"OWB1"
FORMAT_VERSION = 1

ENV_IDS = {"shapes2d": 0, "blocks3d": 1, "threebody": 2}
ENV_NAMES = {v: k for k, v in ENV_IDS.items()}


class DatasetFormatError(ValueError):
    pass


@dataclass(frozen=True)
class DatasetHeader:
    environment: str
    grid_size: int
    num_objects: int
    channels: int
    height: int
    width: int
    num_episodes: int
    steps: int
    provenance: str


def write_buffer(path, buffer: ExperienceBuffer) -> None:
    if buffer.num_episodes == 0:
        raise DatasetFormatError("refusing to write an empty buffer")
    h, w, c = buffer.obs_shape
    prov = buffer.provenance.encode("utf-8")
    with open(path, "wb") as f:
        f.write(MAGIC)
        f.write(struct.pack("<H", FORMAT_VERSION))
        f.write(
            struct.pack(
                "<BBBBHHII",
                ENV_IDS[buffer.environment],
                buffer.grid_size,
                buffer.num_objects,
                c,
                h,
                w,
                buffer.num_episodes,
                buffer.steps,
            )
        )
        f.write(struct.pack("<I", len(prov)))
        f.write(prov)
        for ep in buffer.episodes:
            f.write(ep.attributes.astype(np.uint8).tobytes())
            f.write(ep.observations.astype(np.uint8).tobytes())
            f.write(ep.actions.astype(np.uint8).tobytes())
            if buffer.environment == "threebody":
                f.write(ep.body_states.astype("<f8").tobytes())
            else:
                f.write(ep.grid_positions.astype(np.uint8).tobytes())


def read_header(f) -> DatasetHeader:
    if f.read(4) != MAGIC:
        raise DatasetFormatError("not a dataset file")
    (version,) = struct.unpack("<H", f.read(2))
    if version != FORMAT_VERSION:
        raise DatasetFormatError(f"unsupported dataset version {version}")
    env_id, grid_size, k, c, h, w, n, t = struct.unpack("<BBBBHHII", f.read(16))
    if env_id not in ENV_NAMES:
        raise DatasetFormatError(f"unknown environment id {env_id}")
    (plen,) = struct.unpack("<I", f.read(4))
    provenance = f.read(plen).decode("utf-8")
    return DatasetHeader(ENV_NAMES[env_id], grid_size, k, c, h, w, n, t, provenance)


def read_buffer(path) -> ExperienceBuffer:
    with open(path, "rb") as f:
        hd = read_header(f)
        buf = ExperienceBuffer(
            environment=hd.environment,
            grid_size=hd.grid_size,
            num_objects=hd.num_objects,
            steps=hd.steps,
            provenance=hd.provenance,
        )
        k, t = hd.num_objects, hd.steps
        obs_count = (t + 1) * hd.height * hd.width * hd.channels
        for _ in range(hd.num_episodes):
            attributes = np.frombuffer(f.read(k * 2), dtype=np.uint8).reshape(k, 2)
            observations = np.frombuffer(f.read(obs_count), dtype=np.uint8).reshape(
                t + 1, hd.height, hd.width, hd.channels
            )
            actions = np.frombuffer(f.read(t * 2), dtype=np.uint8).reshape(t, 2)
            episode = Episode(
                observations=observations, actions=actions, attributes=attributes
            )
            if hd.environment == "threebody":
                raw = f.read((t + 1) * k * 5 * 8)
                episode.body_states = np.frombuffer(raw, dtype="<f8").reshape(
                    t + 1, k, 5
                )
            else:
                raw = f.read((t + 1) * k * 2)
                episode.grid_positions = np.frombuffer(raw, dtype=np.uint8).reshape(
                    t + 1, k, 2
                )
            buf.episodes.append(episode)
        if f.read(1):
            raise DatasetFormatError("trailing bytes after final episode")
    return buf


def manifest(path) -> str:
    """Human-readable header dump of a dataset file."""
    with open(path, "rb") as f:
        hd = read_header(f)
    lines = [
        f"environment: {hd.environment}",
        f"grid_size: {hd.grid_size}",
        f"objects: {hd.num_objects}",
        f"observation: {hd.height}x{hd.width}x{hd.channels} uint8",
        f"episodes: {hd.num_episodes}",
        f"steps_per_episode: {hd.steps}",
        f"transitions: {hd.num_episodes * hd.steps}",
        "provenance:",
    ]
    lines += ["  " + ln for ln in hd.provenance.splitlines()]
    return "\n".join(lines) + "\n"
