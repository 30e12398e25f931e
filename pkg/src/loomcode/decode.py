"""Recover response records from a chart grid or a rectified scroll image.

Pipeline: sample the image into a grid (per-channel median over each cell's
inner half), classify every cell to its nearest palette class, collapse pick
blocks by majority vote, segment the pick sequence at maximal boundary runs,
and reassemble one record per well-formed block. Problems degrade to
diagnostics, not failures, so a partially readable scroll still yields data.
Diagnostic row indices refer to picks (equal to chart rows for
rows_per_pick=1); block indices are 1-based in order of appearance.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .encode import ColorGrid
from .model import Palette, ParticipantRecord, Questionnaire, Rgb, validate_record
from .ppm import RasterImage

DEFAULT_CONFIDENCE_THRESHOLD = 0.6

# issues that prevent a block from yielding a record (vs. advisory warnings)
BLOCK_FAILURE_ISSUES = frozenset({"BlockLengthMismatch", "InconsistentRun", "OptionOutOfRange"})


class GeometryError(Exception):
    pass


class ShapeError(Exception):
    pass


@dataclass(frozen=True)
class GridGeometry:
    rows: int
    cols: int
    origin_x: int
    origin_y: int
    cell_w: int
    cell_h: int


@dataclass(frozen=True)
class RowClassification:
    option: int | None  # None means boundary
    confidence: float  # fraction of cells agreeing with the majority

    @property
    def is_boundary(self) -> bool:
        return self.option is None


@dataclass(frozen=True)
class Diagnostic:
    issue: str
    block: int | None = None
    row: int | None = None
    confidence: float | None = None

    def to_json(self) -> dict:
        out: dict = {"issue": self.issue}
        if self.block is not None:
            out["block"] = self.block
        if self.row is not None:
            out["row"] = self.row
        if self.confidence is not None:
            out["confidence"] = self.confidence
        return out


@dataclass
class DecodeResult:
    records: list[ParticipantRecord]
    diagnostics: list[Diagnostic]

    @property
    def has_block_failures(self) -> bool:
        return any(d.issue in BLOCK_FAILURE_ISSUES for d in self.diagnostics)


@dataclass(frozen=True)
class DecodeConfig:
    rows_per_pick: int = 1
    picks_per_answer: int = 1
    boundary_picks: int = 1
    confidence_threshold: float = DEFAULT_CONFIDENCE_THRESHOLD


def _class_matrix(palette: Palette) -> np.ndarray:
    """Option colors then boundary, as an int32 (K+1, 3) matrix."""
    return np.array([c.rgb for c in palette.classes], dtype=np.int32)


def _classify_cells(cells: np.ndarray, classes: np.ndarray) -> np.ndarray:
    """Nearest class per cell by squared RGB distance; ties go to the lowest index."""
    diff = cells[:, None, :].astype(np.int32) - classes[None, :, :]
    d2 = np.sum(diff * diff, axis=2)
    return d2.argmin(axis=1)  # argmin returns the first (lowest) index on ties


def _majority(class_ids: np.ndarray, n_classes: int) -> tuple[int, float]:
    counts = np.bincount(class_ids, minlength=n_classes)
    winner = int(counts.argmax())  # first max = lowest class index
    return winner, counts[winner] / class_ids.size


def sample_grid(image: RasterImage, g: GridGeometry) -> ColorGrid:
    """Sample cell (i,j) as the per-channel lower median over the centered
    inner-half region of the cell's rectangle."""
    if g.rows < 1 or g.cols < 1 or g.cell_w < 1 or g.cell_h < 1:
        raise GeometryError(f"geometry must be positive, got {g}")
    if g.origin_x < 0 or g.origin_y < 0:
        raise GeometryError(f"origin must be non-negative, got {g}")
    if g.origin_y + g.rows * g.cell_h > image.height or g.origin_x + g.cols * g.cell_w > image.width:
        raise GeometryError(
            f"grid {g.rows}x{g.cols} cells of {g.cell_w}x{g.cell_h}px at ({g.origin_x},{g.origin_y}) "
            f"exceeds {image.width}x{image.height} image"
        )
    arr = image.to_array()
    inner_w = max(1, g.cell_w // 2)
    inner_h = max(1, g.cell_h // 2)
    off_x = (g.cell_w - inner_w) // 2
    off_y = (g.cell_h - inner_h) // 2
    mid = (inner_w * inner_h - 1) // 2  # lower median position
    cells: list[Rgb] = []
    for i in range(g.rows):
        y = g.origin_y + i * g.cell_h + off_y
        for j in range(g.cols):
            x = g.origin_x + j * g.cell_w + off_x
            region = arr[y:y + inner_h, x:x + inner_w].reshape(-1, 3)
            med = np.sort(region, axis=0)[mid]
            cells.append((int(med[0]), int(med[1]), int(med[2])))
    return ColorGrid(rows=g.rows, cols=g.cols, cells=cells)


def classify_row(cells: list[Rgb], palette: Palette) -> RowClassification:
    """Majority class over the row's cells; boundary is ordered after the options."""
    classes = _class_matrix(palette)
    ids = _classify_cells(np.array(cells, dtype=np.int32), classes)
    winner, confidence = _majority(ids, len(classes))
    boundary_id = len(palette.option_colors)
    return RowClassification(option=None if winner == boundary_id else winner, confidence=confidence)


def _segment(pick_classes: list[int], boundary_id: int) -> tuple[list[tuple[int, list[int]]], bool, bool]:
    """Split at maximal boundary runs. Returns (blocks as (start_pick, classes),
    had_leading_boundary, had_trailing_boundary)."""
    blocks: list[tuple[int, list[int]]] = []
    current: list[int] = []
    start = 0
    for i, c in enumerate(pick_classes):
        if c == boundary_id:
            if current:
                blocks.append((start, current))
                current = []
        else:
            if not current:
                start = i
            current.append(c)
    if current:
        blocks.append((start, current))
    leading = bool(pick_classes) and pick_classes[0] == boundary_id
    trailing = bool(pick_classes) and pick_classes[-1] == boundary_id
    return blocks, leading, trailing


def decode_grid(
    grid: ColorGrid,
    q: Questionnaire,
    palette: Palette,
    config: DecodeConfig = DecodeConfig(),
) -> DecodeResult:
    rpp = config.rows_per_pick
    if grid.rows % rpp != 0:
        raise ShapeError(f"{grid.rows} grid rows not divisible by rows_per_pick={rpp}")
    n_picks = grid.rows // rpp
    classes = _class_matrix(palette)
    boundary_id = len(palette.option_colors)
    diagnostics: list[Diagnostic] = []

    pick_classes: list[int] = []
    if n_picks:
        ids = _classify_cells(np.array(grid.cells, dtype=np.int32).reshape(-1, 3), classes)
        per_pick = rpp * grid.cols
        for p in range(n_picks):
            winner, confidence = _majority(ids[p * per_pick:(p + 1) * per_pick], len(classes))
            pick_classes.append(winner)
            if confidence < config.confidence_threshold:
                diagnostics.append(Diagnostic("AmbiguousColor", row=p, confidence=confidence))

    blocks, leading, trailing = _segment(pick_classes, boundary_id)
    if leading:
        diagnostics.append(Diagnostic("LeadingBoundary", row=0))
    if trailing:
        diagnostics.append(Diagnostic("TrailingBoundary", row=n_picks - 1))

    ppa = config.picks_per_answer
    n_questions = q.question_count
    records: list[ParticipantRecord] = []
    for b, (start, block) in enumerate(blocks, start=1):
        if len(block) % ppa != 0 or len(block) // ppa != n_questions:
            diagnostics.append(Diagnostic("BlockLengthMismatch", block=b, row=start))
            continue
        answers: list[int] = []
        bad_run = False
        for a in range(n_questions):
            run = block[a * ppa:(a + 1) * ppa]
            if any(c != run[0] for c in run):
                diagnostics.append(Diagnostic("InconsistentRun", block=b, row=start + a * ppa))
                bad_run = True
                break
            answers.append(run[0])
        if bad_run:
            continue
        record = ParticipantRecord(f"p{len(records) + 1}", answers)
        if validate_record(q, record):
            diagnostics.append(Diagnostic("OptionOutOfRange", block=b, row=start))
            continue
        records.append(record)
    return DecodeResult(records=records, diagnostics=diagnostics)


def decode_image(
    image: RasterImage,
    g: GridGeometry,
    q: Questionnaire,
    palette: Palette,
    config: DecodeConfig = DecodeConfig(),
) -> DecodeResult:
    return decode_grid(sample_grid(image, g), q, palette, config)
