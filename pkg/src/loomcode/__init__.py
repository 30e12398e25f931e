"""loomcode: encode survey responses as plain-weave drafts, render decodable
chart scrolls, interchange them as WIF, and read them back into data."""

__version__ = "0.1.0"

from .decode import (
    DecodeConfig,
    DecodeResult,
    Diagnostic,
    GridGeometry,
    RowClassification,
    classify_row,
    decode_grid,
    decode_image,
    sample_grid,
)
from .encode import (
    ColorGrid,
    EncodeConfig,
    WeavingDraft,
    WeftPick,
    encode_session,
    export_svg,
    render_chart,
)
from .model import (
    Palette,
    ParticipantRecord,
    Question,
    Questionnaire,
    ResponseOption,
    ValidationIssue,
    YarnColor,
    validate_palette,
    validate_questionnaire,
    validate_record,
)
from .wif import WifMetadata, emit_wif, parse_wif

__all__ = [
    "ColorGrid", "DecodeConfig", "DecodeResult", "Diagnostic", "EncodeConfig",
    "GridGeometry", "Palette", "ParticipantRecord", "Question", "Questionnaire",
    "ResponseOption", "RowClassification", "ValidationIssue", "WeavingDraft",
    "WeftPick", "WifMetadata", "YarnColor", "classify_row", "decode_grid",
    "decode_image", "emit_wif", "encode_session", "export_svg", "parse_wif",
    "render_chart", "sample_grid", "validate_palette", "validate_questionnaire",
    "validate_record",
]
