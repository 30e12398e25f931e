"""WIF 1.1 emitter and parser for the 2-shaft plain-weave subset.

Covered sections: WIF, CONTENTS, COLOR PALETTE, COLOR TABLE, WARP, WEFT,
WEFT COLORS, THREADING, TIEUP, TREADLING. Pick roles (data vs boundary) are
not representable in WIF; parsed picks come back with role "unknown".
Emission never reads the clock: the Date line comes from WifMetadata.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .encode import WeavingDraft, WeftPick
from .model import Palette, Rgb, YarnColor


class WifError(Exception):
    pass


class MissingSection(WifError):
    def __init__(self, name: str):
        super().__init__(f"missing section [{name}]")
        self.name = name


class MalformedLine(WifError):
    def __init__(self, line_number: int, reason: str):
        super().__init__(f"line {line_number}: {reason}")
        self.line_number = line_number


class InconsistentCount(WifError):
    pass


class ColorIndexOutOfRange(WifError):
    pass


class UnsupportedStructure(WifError):
    pass


@dataclass(frozen=True)
class WifMetadata:
    source_program: str = "loomcode"
    source_version: str = "0.1.0"
    date: str = "April 20, 1997"
    developers: str = "wif@mhsoft.com"


@dataclass
class WifSection:
    name: str
    line_number: int
    entries: list[tuple[str, str]] = field(default_factory=list)
    entry_lines: list[int] = field(default_factory=list)

    def get(self, key: str) -> str | None:
        lowered = key.lower()
        for k, v in self.entries:
            if k.lower() == lowered:
                return v
        return None

    def require(self, key: str) -> str:
        value = self.get(key)
        if value is None:
            raise MalformedLine(self.line_number, f"section [{self.name}] lacks key {key!r}")
        return value


@dataclass
class WifDocument:
    sections: list[WifSection] = field(default_factory=list)

    def section(self, name: str) -> WifSection | None:
        lowered = name.lower()
        for s in self.sections:
            if s.name.lower() == lowered:
                return s
        return None

    def require(self, name: str) -> WifSection:
        s = self.section(name)
        if s is None:
            raise MissingSection(name.upper())
        return s


SECTION_ORDER = [
    "WIF", "CONTENTS", "COLOR PALETTE", "COLOR TABLE", "WARP", "WEFT",
    "WEFT COLORS", "THREADING", "TIEUP", "TREADLING",
]

_TRUE_WORDS = {"yes", "true", "on", "1"}
_FALSE_WORDS = {"no", "false", "off", "0"}


def parse_document(text: str) -> WifDocument:
    """Line-oriented INI parse: [SECTION] headers, key=value entries,
    ; comment lines, blank lines ignored. Section names and keys must be
    unique (case-insensitively)."""
    doc = WifDocument()
    current: WifSection | None = None
    seen_sections: set[str] = set()
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith(";"):
            continue
        if line.startswith("["):
            if not line.endswith("]"):
                raise MalformedLine(lineno, f"malformed section header {raw!r}")
            name = line[1:-1].strip()
            if not name:
                raise MalformedLine(lineno, "empty section name")
            if name.lower() in seen_sections:
                raise MalformedLine(lineno, f"duplicate section [{name}]")
            seen_sections.add(name.lower())
            current = WifSection(name=name, line_number=lineno)
            doc.sections.append(current)
            continue
        if "=" not in line:
            raise MalformedLine(lineno, f"expected key=value, got {raw!r}")
        if current is None:
            raise MalformedLine(lineno, "key=value before any section header")
        key, _, value = line.partition("=")
        key = key.strip()
        value = value.strip()
        if not key:
            raise MalformedLine(lineno, "empty key")
        if current.get(key) is not None:
            raise MalformedLine(lineno, f"duplicate key {key!r} in [{current.name}]")
        current.entries.append((key, value))
        current.entry_lines.append(lineno)
    return doc


def _color_table(palette: Palette) -> tuple[list[YarnColor], dict[Rgb, int]]:
    """Deduplicated color table: option colors, boundary, warp, in order.
    Returns the table and an rgb -> 1-based index map."""
    table: list[YarnColor] = []
    index: dict[Rgb, int] = {}
    for color in [*palette.option_colors, palette.boundary, palette.warp]:
        if color.rgb not in index:
            table.append(color)
            index[color.rgb] = len(table)
    return table, index


def emit_wif(draft: WeavingDraft, palette: Palette, metadata: WifMetadata = WifMetadata()) -> str:
    table, index = _color_table(palette)
    for pick in draft.picks:
        if pick.color.rgb not in index:
            raise ValueError(f"pick color {pick.color.name!r} {pick.color.rgb} is not in the palette")
    if draft.warp_color.rgb not in index:
        raise ValueError(f"warp color {draft.warp_color.name!r} is not in the palette")

    lines: list[str] = []
    lines.append("[WIF]")
    lines.append("Version=1.1")
    lines.append(f"Date={metadata.date}")
    lines.append(f"Developers={metadata.developers}")
    lines.append(f"Source Program={metadata.source_program}")
    lines.append(f"Source Version={metadata.source_version}")
    lines.append("")
    lines.append("[CONTENTS]")
    for name in SECTION_ORDER[2:]:
        lines.append(f"{name}=yes")
    lines.append("")
    lines.append("[COLOR PALETTE]")
    lines.append(f"Entries={len(table)}")
    lines.append("Range=0,255")
    lines.append("")
    lines.append("[COLOR TABLE]")
    for i, color in enumerate(table, start=1):
        r, g, b = color.rgb
        lines.append(f"{i}={r},{g},{b}")
    lines.append("")
    lines.append("[WARP]")
    lines.append(f"Threads={draft.warp_ends}")
    lines.append(f"Color={index[draft.warp_color.rgb]}")
    lines.append("")
    lines.append("[WEFT]")
    lines.append(f"Threads={len(draft.picks)}")
    lines.append("")
    lines.append("[WEFT COLORS]")
    for i, pick in enumerate(draft.picks, start=1):
        lines.append(f"{i}={index[pick.color.rgb]}")
    lines.append("")
    lines.append("[THREADING]")
    for end in range(1, draft.warp_ends + 1):
        lines.append(f"{end}={(end - 1) % 2 + 1}")
    lines.append("")
    lines.append("[TIEUP]")
    lines.append("1=1")
    lines.append("2=2")
    lines.append("")
    lines.append("[TREADLING]")
    for i in range(1, len(draft.picks) + 1):
        lines.append(f"{i}={(i - 1) % 2 + 1}")
    lines.append("")
    return "\n".join(lines)


@dataclass
class WifParseResult:
    draft: WeavingDraft
    color_table: list[YarnColor]
    warp_color: YarnColor


def _int_value(section: WifSection, key: str) -> int:
    value = section.require(key)
    try:
        return int(value)
    except ValueError:
        raise MalformedLine(section.line_number, f"[{section.name}] {key}={value!r} is not an integer") from None


def _numbered_values(section: WifSection, count: int, what: str) -> list[str]:
    """Entries must be exactly 1=..., 2=..., ..., count=... (any order)."""
    by_num: dict[int, str] = {}
    for (key, value), lineno in zip(section.entries, section.entry_lines):
        try:
            num = int(key)
        except ValueError:
            raise MalformedLine(lineno, f"[{section.name}] key {key!r} is not a number") from None
        by_num[num] = value
    if sorted(by_num) != list(range(1, count + 1)):
        raise InconsistentCount(f"[{section.name}] has {len(by_num)} entries, expected {what}={count}")
    return [by_num[i] for i in range(1, count + 1)]


def _check_contents(section: WifSection) -> None:
    for (key, value), lineno in zip(section.entries, section.entry_lines):
        if value.lower() not in _TRUE_WORDS | _FALSE_WORDS:
            raise MalformedLine(lineno, f"[CONTENTS] {key}={value!r} is not a boolean")


def _check_plain_weave(threading: list[str], tieup: WifSection, treadling: list[str]) -> None:
    def shaft(value: str, where: str) -> int:
        if "," in value:
            raise UnsupportedStructure(f"{where} lifts multiple shafts: {value!r}")
        try:
            n = int(value)
        except ValueError:
            raise UnsupportedStructure(f"{where} value {value!r} is not a shaft number") from None
        if n not in (1, 2):
            raise UnsupportedStructure(f"{where} uses shaft {n}, only 2-shaft plain weave is supported")
        return n

    ends = [shaft(v, f"threading end {i + 1}") for i, v in enumerate(threading)]
    for i in range(1, len(ends)):
        if ends[i] == ends[i - 1]:
            raise UnsupportedStructure(f"threading does not alternate at end {i + 1}")

    ties = _numbered_values(tieup, 2, "treadles")
    lifted = [shaft(v, f"tieup treadle {i + 1}") for i, v in enumerate(ties)]
    if sorted(lifted) != [1, 2]:
        raise UnsupportedStructure(f"tieup {ties} is not a plain-weave tieup")

    picks = [shaft(v, f"treadling pick {i + 1}") for i, v in enumerate(treadling)]
    for i in range(1, len(picks)):
        if picks[i] == picks[i - 1]:
            raise UnsupportedStructure(f"treadling does not alternate at pick {i + 1}")


def parse_wif(text: str) -> WifParseResult:
    """Reconstruct warp_ends and pick colors from WIF text.

    Pick roles are not recoverable; all picks come back with role "unknown".
    picks_per_answer and boundary_picks are likewise not represented and
    default to 1 on the returned draft.
    """
    doc = parse_document(text)
    doc.require("WIF")
    contents = doc.section("CONTENTS")
    if contents is not None:
        _check_contents(contents)

    palette_section = doc.require("COLOR PALETTE")
    entries = _int_value(palette_section, "Entries")
    range_value = palette_section.require("Range")
    if [p.strip() for p in range_value.split(",")] != ["0", "255"]:
        raise UnsupportedStructure(f"color range {range_value!r} is not 0,255")

    table_section = doc.require("COLOR TABLE")
    raw_colors = _numbered_values(table_section, entries, "Entries")
    table: list[YarnColor] = []
    for i, value in enumerate(raw_colors, start=1):
        parts = [p.strip() for p in value.split(",")]
        if len(parts) != 3 or not all(p.lstrip("-").isdigit() for p in parts):
            raise MalformedLine(table_section.line_number, f"color {i}={value!r} is not r,g,b")
        rgb = tuple(int(p) for p in parts)
        if any(c < 0 or c > 255 for c in rgb):
            raise MalformedLine(table_section.line_number, f"color {i}={value!r} outside 0..255")
        table.append(YarnColor(f"color-{i}", rgb))  # WIF color tables carry no names

    def color_at(idx_text: str, where: str, lineno: int) -> YarnColor:
        try:
            idx = int(idx_text)
        except ValueError:
            raise MalformedLine(lineno, f"{where} color index {idx_text!r} is not an integer") from None
        if idx < 1 or idx > len(table):
            raise ColorIndexOutOfRange(f"{where} color index {idx} outside 1..{len(table)}")
        return table[idx - 1]

    warp_section = doc.require("WARP")
    warp_ends = _int_value(warp_section, "Threads")
    if warp_ends < 1:
        raise MalformedLine(warp_section.line_number, f"[WARP] Threads={warp_ends} must be positive")
    warp_color = color_at(warp_section.require("Color"), "[WARP]", warp_section.line_number)

    weft_section = doc.require("WEFT")
    weft_threads = _int_value(weft_section, "Threads")
    if weft_threads < 0:
        raise MalformedLine(weft_section.line_number, f"[WEFT] Threads={weft_threads} is negative")

    weft_colors_section = doc.require("WEFT COLORS")
    weft_colors = _numbered_values(weft_colors_section, weft_threads, "Threads")
    picks = [
        WeftPick.unknown(color_at(v, f"[WEFT COLORS] pick {i + 1}", weft_colors_section.line_number))
        for i, v in enumerate(weft_colors)
    ]

    threading = _numbered_values(doc.require("THREADING"), warp_ends, "Threads")
    treadling = _numbered_values(doc.require("TREADLING"), weft_threads, "Threads")
    _check_plain_weave(threading, doc.require("TIEUP"), treadling)

    draft = WeavingDraft(warp_ends=warp_ends, warp_color=warp_color, picks=picks)
    return WifParseResult(draft=draft, color_table=table, warp_color=warp_color)
