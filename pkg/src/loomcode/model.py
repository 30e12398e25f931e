"""Domain types and validation for questionnaires, yarn palettes and response records.

Answers are 0-based option indices; labels are display-only. One yarn color per
option index, shared across all questions, plus a neutral boundary yarn and a
warp yarn. Color distances are Euclidean in RGB, computed on exact integers.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

Rgb = tuple[int, int, int]

DEFAULT_MIN_DISTANCE = 64.0


@dataclass(frozen=True)
class ResponseOption:
    index: int
    label: str


@dataclass
class Question:
    id: str
    prompt: str
    options: list[ResponseOption]

    @property
    def option_count(self) -> int:
        return len(self.options)


def question(qid: str, prompt: str, labels: list[str]) -> Question:
    """Build a Question with contiguous 0-based option indices."""
    return Question(qid, prompt, [ResponseOption(i, lb) for i, lb in enumerate(labels)])


@dataclass
class Questionnaire:
    id: str
    title: str
    questions: list[Question]

    @property
    def question_count(self) -> int:
        return len(self.questions)

    @property
    def max_option_count(self) -> int:
        return max((q.option_count for q in self.questions), default=0)


@dataclass(frozen=True)
class YarnColor:
    name: str
    rgb: Rgb


@dataclass
class Palette:
    """Yarns for a session: option_colors[k] is the yarn for option index k."""

    option_colors: list[YarnColor]
    boundary: YarnColor
    warp: YarnColor

    def color_for_option(self, k: int) -> YarnColor:
        return self.option_colors[k]

    @property
    def classes(self) -> list[YarnColor]:
        """Decodable classes: option colors then boundary (boundary ordered last)."""
        return [*self.option_colors, self.boundary]


@dataclass
class ParticipantRecord:
    participant_id: str
    answers: list[int]


@dataclass(frozen=True)
class ValidationIssue:
    code: str
    message: str

    def __str__(self) -> str:
        return f"{self.code}: {self.message}"


def squared_distance(a: Rgb, b: Rgb) -> int:
    """Exact integer squared Euclidean RGB distance."""
    return sum((x - y) * (x - y) for x, y in zip(a, b))


def rgb_distance(a: Rgb, b: Rgb) -> float:
    return math.sqrt(squared_distance(a, b))


def validate_questionnaire(q: Questionnaire) -> list[ValidationIssue]:
    """Return [] when valid; issues name the offending question id."""
    issues: list[ValidationIssue] = []
    if not q.questions:
        issues.append(ValidationIssue("EmptyQuestionnaire", f"questionnaire {q.id!r} has no questions"))
    seen: set[str] = set()
    for qu in q.questions:
        if qu.id in seen:
            issues.append(ValidationIssue("DuplicateQuestionId", f"question id {qu.id!r} appears more than once"))
        seen.add(qu.id)
        if len(qu.options) < 2:
            issues.append(ValidationIssue("TooFewOptions", f"question {qu.id!r} has {len(qu.options)} option(s), need at least 2"))
        if any(not opt.label for opt in qu.options):
            issues.append(ValidationIssue("EmptyOptionLabel", f"question {qu.id!r} has an empty option label"))
        if [opt.index for opt in qu.options] != list(range(len(qu.options))):
            issues.append(ValidationIssue("BadOptionIndices", f"question {qu.id!r} option indices are not contiguous from 0"))
    return issues


def validate_palette(p: Palette, min_distance: float = DEFAULT_MIN_DISTANCE) -> list[ValidationIssue]:
    """Check pairwise separation of option colors and the boundary color.

    Every pair among option_colors + boundary must be at Euclidean RGB distance
    >= min_distance. Identical colors are always DuplicateColor, regardless of
    min_distance. Offending pairs are reported closest first. The warp color is
    presentation-only and not constrained.
    """
    issues: list[ValidationIssue] = []
    entries = p.classes
    for color in [*entries, p.warp]:
        if any(c < 0 or c > 255 for c in color.rgb):
            issues.append(ValidationIssue("ChannelOutOfRange", f"color {color.name!r} has channels outside 0..255"))
    # compare on squared distance; sqrt only for reporting
    min_sq = min_distance * min_distance
    offenders: list[tuple[int, YarnColor, YarnColor]] = []
    for i in range(len(entries)):
        for j in range(i + 1, len(entries)):
            d2 = squared_distance(entries[i].rgb, entries[j].rgb)
            if d2 == 0 or d2 < min_sq:
                offenders.append((d2, entries[i], entries[j]))
    offenders.sort(key=lambda t: t[0])
    for d2, a, b in offenders:
        if d2 == 0:
            issues.append(ValidationIssue("DuplicateColor", f"colors {a.name!r} and {b.name!r} are identical"))
        else:
            issues.append(ValidationIssue(
                "ColorsTooClose",
                f"colors {a.name!r} and {b.name!r} are {math.sqrt(d2):.1f} apart, need >= {min_distance:g}",
            ))
    return issues


def validate_record(q: Questionnaire, r: ParticipantRecord) -> list[ValidationIssue]:
    """Check a record against a questionnaire that already validated."""
    expected = q.question_count
    got = len(r.answers)
    if got != expected:
        return [ValidationIssue("AnswerCountMismatch", f"record {r.participant_id!r}: expected {expected} answers, got {got}")]
    issues: list[ValidationIssue] = []
    for qi, answer in enumerate(r.answers):
        if answer < 0 or answer >= q.questions[qi].option_count:
            issues.append(ValidationIssue(
                "OptionOutOfRange",
                f"record {r.participant_id!r}: answer {answer} out of range for question {qi} "
                f"({q.questions[qi].option_count} options)",
            ))
    return issues


def check_palette_covers(p: Palette, q: Questionnaire) -> list[ValidationIssue]:
    """The palette must provide a yarn for every option index used by q."""
    need = q.max_option_count
    have = len(p.option_colors)
    if have < need:
        return [ValidationIssue("PaletteTooSmall", f"palette has {have} option colors, questionnaire needs {need}")]
    return []
