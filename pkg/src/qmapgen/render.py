"""Map rendering and map-file I/O.

The palette is fixed at 53 nation colors (golden-angle hue stepping) so runs
of any supported size color consistently; unclaimed ground is black, ruins
are white, and a city darkens its owner's color to read as a marker. The
browser client carries the same table as literal constants.
"""

from __future__ import annotations

import colorsys
import struct
from typing import Iterator, Mapping

import numpy as np

from .engine import RunConfig
from .worldmap import WorldMap, detect_transfers

__all__ = [
    "PALETTE",
    "palette_formula",
    "render_rgb",
    "write_ppm",
    "write_png",
    "save_snapshot",
    "load_snapshot",
    "replay_history",
]

PALETTE_SIZE = 53
_GOLDEN = 0.6180339887498949

UNCLAIMED_COLOR = (0, 0, 0)
RUIN_COLOR = (255, 255, 255)
CITY_DARKEN = 0.3


def palette_formula(size: int = PALETTE_SIZE) -> list[tuple[int, int, int]]:
    """Nation colors: golden-angle hues with cycling saturation/value."""
    colors = []
    for i in range(size):
        h = (i * _GOLDEN) % 1.0
        s = 0.55 + 0.30 * (i % 3) / 2.0
        v = 0.95 - 0.25 * (i % 2)
        r, g, b = colorsys.hsv_to_rgb(h, s, v)
        colors.append((int(round(r * 255)), int(round(g * 255)), int(round(b * 255))))
    return colors


PALETTE = palette_formula()


def render_rgb(world: WorldMap) -> np.ndarray:
    """(L, L, 3) uint8 image of the current map."""
    L = world.config.L
    rgb = np.zeros((L, L, 3), dtype=np.uint8)
    palette = np.array(
        [UNCLAIMED_COLOR] + [PALETTE[j % PALETTE_SIZE] for j in range(world.num_nations)],
        dtype=np.uint8,
    )
    rgb[:] = palette[world.ownership + 1]
    rgb[world.ruins] = RUIN_COLOR
    for city in world.cities:
        color = PALETTE[city.owner % PALETTE_SIZE]
        rgb[city.row, city.col] = tuple(int(c * CITY_DARKEN) for c in color)
    return rgb


def write_ppm(path, rgb: np.ndarray) -> None:
    height, width = rgb.shape[:2]
    with open(path, "wb") as fh:
        fh.write(f"P6\n{width} {height}\n255\n".encode("ascii"))
        fh.write(rgb.astype(np.uint8).tobytes())


def write_png(path, rgb: np.ndarray) -> None:
    from PIL import Image

    Image.fromarray(rgb.astype(np.uint8), mode="RGB").save(path, format="PNG")


_SNAPSHOT_MAGIC = b"QMAP"
_SNAPSHOT_VERSION = 1


def save_snapshot(path, world: WorldMap, round_index: int) -> None:
    """Compact binary map state: header (L, r, round) then row-major owner
    indices as little-endian int16 (-1 for unclaimed)."""
    header = struct.pack(
        "<4sBHHH",
        _SNAPSHOT_MAGIC,
        _SNAPSHOT_VERSION,
        world.config.L,
        world.config.r,
        round_index,
    )
    with open(path, "wb") as fh:
        fh.write(header)
        fh.write(world.ownership.astype("<i2").tobytes())


def load_snapshot(path) -> tuple[int, int, int, np.ndarray]:
    """Returns (L, r, round, ownership)."""
    with open(path, "rb") as fh:
        raw = fh.read()
    magic, version, L, r, round_index = struct.unpack_from("<4sBHHH", raw)
    if magic != _SNAPSHOT_MAGIC:
        raise ValueError("not a map snapshot file")
    if version != _SNAPSHOT_VERSION:
        raise ValueError(f"unsupported snapshot version {version}")
    grid = np.frombuffer(raw[struct.calcsize("<4sBHHH"):], dtype="<i2")
    if grid.size != L * L:
        raise ValueError("snapshot payload does not match its header")
    return L, r, round_index, grid.reshape(L, L).astype(np.int32)


def replay_history(history: Mapping) -> Iterator[tuple[int, WorldMap]]:
    """Rebuild the world round by round from a history document.

    Placements and razings replay verbatim; transfers re-derive from the
    recomputed ownership and are checked against the recorded ones. Yields
    (round_index, world) starting with the initial layout at round 0.
    """
    config = history["config"]
    run_config = RunConfig.from_dict(config)
    world = WorldMap.create(
        run_config.map_config,
        run_config.coupling.n,
        [tuple(c) for c in config["capitals"]],
    )
    yield 0, world
    for record in history["rounds"]:
        round_index = record["round"]
        for placement in record["placements"]:
            for razed in placement["razed"]:
                city = world.city_at(tuple(razed))
                if city is None:
                    raise ValueError(f"history replay: no city at {razed} to raze")
                world.raze_city(city)
            world.add_city(placement["nation"], tuple(placement["cell"]), round_index)
        transfers = detect_transfers(world, world)
        recorded = [(tuple(t["cell"]), t["from"], t["to"]) for t in record["transfers"]]
        replayed = [(t.cell, t.old_owner, t.new_owner) for t in transfers]
        if recorded != replayed:
            raise ValueError(
                f"history replay diverged at round {round_index}: "
                f"{replayed} != {recorded}"
            )
        yield round_index, world
