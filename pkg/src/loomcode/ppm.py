"""PPM raster support: P3 (ASCII) and P6 (binary), maxval 255, bit-exact.

This is the chart interchange format between the encoder and the decoder.
Header comments (# to end of line) are accepted anywhere whitespace is legal.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .encode import ColorGrid


class UnreadableImage(Exception):
    pass


@dataclass
class RasterImage:
    width: int
    height: int
    pixels: bytes  # row-major RGB, len == width * height * 3

    def to_array(self) -> np.ndarray:
        return np.frombuffer(self.pixels, dtype=np.uint8).reshape(self.height, self.width, 3)

    @classmethod
    def from_array(cls, arr: np.ndarray) -> "RasterImage":
        h, w, _ = arr.shape
        return cls(width=w, height=h, pixels=np.ascontiguousarray(arr, dtype=np.uint8).tobytes())


def _header_tokens(data: bytes, count: int) -> tuple[list[bytes], int]:
    """Read `count` whitespace-separated header tokens, skipping # comments.

    Returns the tokens and the offset just past the single whitespace byte
    that terminates the last token.
    """
    tokens: list[bytes] = []
    i = 0
    n = len(data)
    while len(tokens) < count:
        while i < n and data[i:i + 1].isspace():
            i += 1
        if i < n and data[i:i + 1] == b"#":
            while i < n and data[i] != 0x0A:
                i += 1
            continue
        start = i
        while i < n and not data[i:i + 1].isspace() and data[i:i + 1] != b"#":
            i += 1
        if i == start:
            raise UnreadableImage("truncated header")
        tokens.append(data[start:i])
        if len(tokens) == count:
            if i >= n or not data[i:i + 1].isspace():
                raise UnreadableImage("missing whitespace after header")
            i += 1  # exactly one whitespace byte before the raster
    return tokens, i


def read_ppm(data: bytes) -> RasterImage:
    if data[:2] not in (b"P3", b"P6"):
        raise UnreadableImage(f"unsupported format magic {data[:2]!r}, need P3 or P6")
    magic = data[:2]
    try:
        tokens, offset = _header_tokens(data[2:], 3)
    except UnreadableImage:
        raise
    try:
        width, height, maxval = (int(t) for t in tokens)
    except ValueError:
        raise UnreadableImage("non-numeric header field") from None
    if width < 0 or height < 0:
        raise UnreadableImage("negative image dimensions")
    if maxval != 255:
        raise UnreadableImage(f"unsupported maxval {maxval}, need 255")
    expected = width * height * 3

    if magic == b"P6":
        raster = data[2 + offset:2 + offset + expected]
        if len(raster) < expected:
            raise UnreadableImage(f"truncated raster: expected {expected} bytes, got {len(raster)}")
        return RasterImage(width, height, bytes(raster))

    # P3: remaining content is ASCII samples; comments may still appear
    text = data[2 + offset:].decode("ascii", errors="replace")
    values: list[int] = []
    for line in text.splitlines():
        body = line.split("#", 1)[0]
        for tok in body.split():
            try:
                values.append(int(tok))
            except ValueError:
                raise UnreadableImage(f"non-numeric sample {tok!r}") from None
    if len(values) != expected:
        raise UnreadableImage(f"expected {expected} samples, got {len(values)}")
    if any(v < 0 or v > 255 for v in values):
        raise UnreadableImage("sample out of 0..255")
    return RasterImage(width, height, bytes(values))


def write_ppm(img: RasterImage, binary: bool = True) -> bytes:
    header = f"P6\n{img.width} {img.height}\n255\n" if binary else f"P3\n{img.width} {img.height}\n255\n"
    if binary:
        return header.encode("ascii") + img.pixels
    lines = [header.rstrip("\n")]
    px = img.pixels
    for i in range(0, len(px), 3):
        lines.append(f"{px[i]} {px[i + 1]} {px[i + 2]}")
    return ("\n".join(lines) + "\n").encode("ascii")


def read_ppm_file(path: str | Path) -> RasterImage:
    try:
        data = Path(path).read_bytes()
    except OSError as e:
        raise UnreadableImage(str(e)) from e
    return read_ppm(data)


def write_ppm_file(path: str | Path, img: RasterImage, binary: bool = True) -> None:
    Path(path).write_bytes(write_ppm(img, binary=binary))


def grid_to_image(grid: ColorGrid, cell_px: int) -> RasterImage:
    """Expand each grid cell into a cell_px x cell_px pixel block."""
    if grid.rows == 0 or grid.cols == 0:
        return RasterImage(grid.cols * cell_px, grid.rows * cell_px, b"")
    arr = np.array(grid.cells, dtype=np.uint8).reshape(grid.rows, grid.cols, 3)
    arr = np.repeat(np.repeat(arr, cell_px, axis=0), cell_px, axis=1)
    return RasterImage.from_array(arr)
