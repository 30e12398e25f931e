"""Compile response records into a plain-weave draft and render it as a color grid.

One data pick per answer (times picks_per_answer), in participant order then
question order, with a run of boundary picks between consecutive participants.
The chart shows each pick's weft color across the full warp width so it can be
read back by the decoder; warp interlacement is not drawn.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .model import (
    DEFAULT_MIN_DISTANCE,
    Palette,
    ParticipantRecord,
    Questionnaire,
    Rgb,
    ValidationIssue,
    YarnColor,
    check_palette_covers,
    validate_palette,
    validate_questionnaire,
    validate_record,
)

DEFAULT_WARP_ENDS = 24
NATURAL_WARP = YarnColor("Natural", (242, 238, 230))

ROLE_DATA = "data"
ROLE_BOUNDARY = "boundary"
ROLE_UNKNOWN = "unknown"  # picks read back from interchange files lose their role

SHAFTS = 2  # plain weave on a rigid heddle loom


class ValidationFailed(Exception):
    """Encoding input failed validation; .issues holds the details."""

    def __init__(self, issues: list[ValidationIssue]):
        super().__init__("; ".join(str(i) for i in issues))
        self.issues = issues


class PaletteTooSmall(Exception):
    pass


@dataclass(frozen=True)
class WeftPick:
    color: YarnColor
    role: str = ROLE_DATA
    participant_index: int | None = None
    question_index: int | None = None

    @classmethod
    def data(cls, color: YarnColor, participant_index: int, question_index: int) -> "WeftPick":
        return cls(color, ROLE_DATA, participant_index, question_index)

    @classmethod
    def boundary(cls, color: YarnColor) -> "WeftPick":
        return cls(color, ROLE_BOUNDARY)

    @classmethod
    def unknown(cls, color: YarnColor) -> "WeftPick":
        return cls(color, ROLE_UNKNOWN)

    @property
    def is_boundary(self) -> bool:
        return self.role == ROLE_BOUNDARY


@dataclass
class WeavingDraft:
    warp_ends: int
    warp_color: YarnColor
    picks: list[WeftPick] = field(default_factory=list)
    picks_per_answer: int = 1
    boundary_picks: int = 1


@dataclass
class ColorGrid:
    """Rectangular readout chart; cells are row-major RGB triples."""

    rows: int
    cols: int
    cells: list[Rgb]

    def row(self, i: int) -> list[Rgb]:
        return self.cells[i * self.cols:(i + 1) * self.cols]


@dataclass(frozen=True)
class EncodeConfig:
    warp_ends: int = DEFAULT_WARP_ENDS
    picks_per_answer: int = 1
    boundary_picks: int = 1


def encode_session(
    q: Questionnaire,
    palette: Palette,
    records: list[ParticipantRecord],
    config: EncodeConfig = EncodeConfig(),
) -> WeavingDraft:
    """Compile ordered records into a draft; boundaries go between participants only."""
    issues = validate_questionnaire(q)
    issues += validate_palette(palette, DEFAULT_MIN_DISTANCE)
    for rec in records:
        issues += validate_record(q, rec)
    if issues:
        raise ValidationFailed(issues)
    if check_palette_covers(palette, q):
        raise PaletteTooSmall(f"palette has {len(palette.option_colors)} option colors, "
                              f"questionnaire needs {q.max_option_count}")

    picks: list[WeftPick] = []
    for pi, rec in enumerate(records):
        if pi > 0:
            picks.extend([WeftPick.boundary(palette.boundary)] * config.boundary_picks)
        for qi, answer in enumerate(rec.answers):
            pick = WeftPick.data(palette.color_for_option(answer), pi, qi)
            picks.extend([pick] * config.picks_per_answer)
    return WeavingDraft(
        warp_ends=config.warp_ends,
        warp_color=palette.warp,
        picks=picks,
        picks_per_answer=config.picks_per_answer,
        boundary_picks=config.boundary_picks,
    )


def render_chart(draft: WeavingDraft, rows_per_pick: int = 1) -> ColorGrid:
    """Readout chart: each pick becomes rows_per_pick full-width rows of its color."""
    cols = draft.warp_ends
    cells: list[Rgb] = []
    for pick in draft.picks:
        cells.extend([pick.color.rgb] * (cols * rows_per_pick))
    return ColorGrid(rows=len(draft.picks) * rows_per_pick, cols=cols, cells=cells)


def export_svg(grid: ColorGrid, cell_px: int) -> str:
    """SVG 1.1 document with exactly rows*cols filled rectangles."""
    width = grid.cols * cell_px
    height = grid.rows * cell_px
    parts = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" '
        f'width="{width}" height="{height}" viewBox="0 0 {width} {height}">',
    ]
    for i in range(grid.rows):
        for j in range(grid.cols):
            r, g, b = grid.cells[i * grid.cols + j]
            parts.append(
                f'<rect x="{j * cell_px}" y="{i * cell_px}" width="{cell_px}" '
                f'height="{cell_px}" fill="#{r:02x}{g:02x}{b:02x}"/>'
            )
    parts.append("</svg>")
    return "\n".join(parts)
