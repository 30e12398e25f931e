"""File interchange: questionnaire and palette JSON, responses CSV,
diagnostics sidecar JSON."""

from __future__ import annotations

import csv
import io
import json
from pathlib import Path

from .decode import Diagnostic
from .model import Palette, ParticipantRecord, Question, Questionnaire, ResponseOption, YarnColor


class FileFormatError(Exception):
    pass


def _require(obj: dict, key: str, where: str):
    if not isinstance(obj, dict) or key not in obj:
        raise FileFormatError(f"{where}: missing {key!r}")
    return obj[key]


def questionnaire_from_json(obj: dict) -> Questionnaire:
    questions = []
    for q in _require(obj, "questions", "questionnaire"):
        labels = _require(q, "options", f"question {q.get('id')!r}")
        if not isinstance(labels, list) or not all(isinstance(lb, str) for lb in labels):
            raise FileFormatError(f"question {q.get('id')!r}: options must be a list of labels")
        questions.append(Question(
            id=str(_require(q, "id", "question")),
            prompt=str(_require(q, "prompt", f"question {q.get('id')!r}")),
            options=[ResponseOption(i, lb) for i, lb in enumerate(labels)],
        ))
    return Questionnaire(id=str(_require(obj, "id", "questionnaire")),
                         title=str(_require(obj, "title", "questionnaire")),
                         questions=questions)


def questionnaire_to_json(q: Questionnaire) -> dict:
    return {
        "id": q.id,
        "title": q.title,
        "questions": [
            {"id": qu.id, "prompt": qu.prompt, "options": [opt.label for opt in qu.options]}
            for qu in q.questions
        ],
    }


def _color_from_json(obj: dict, where: str) -> YarnColor:
    rgb = _require(obj, "rgb", where)
    if not isinstance(rgb, list) or len(rgb) != 3 or not all(isinstance(c, int) for c in rgb):
        raise FileFormatError(f"{where}: rgb must be three integers")
    return YarnColor(name=str(_require(obj, "name", where)), rgb=(rgb[0], rgb[1], rgb[2]))


def _color_to_json(c: YarnColor) -> dict:
    return {"name": c.name, "rgb": list(c.rgb)}


def palette_from_json(obj: dict) -> Palette:
    return Palette(
        option_colors=[_color_from_json(c, "option color") for c in _require(obj, "option_colors", "palette")],
        boundary=_color_from_json(_require(obj, "boundary", "palette"), "boundary"),
        warp=_color_from_json(_require(obj, "warp", "palette"), "warp"),
    )


def palette_to_json(p: Palette) -> dict:
    return {
        "option_colors": [_color_to_json(c) for c in p.option_colors],
        "boundary": _color_to_json(p.boundary),
        "warp": _color_to_json(p.warp),
    }


def load_questionnaire(path: str | Path) -> Questionnaire:
    return questionnaire_from_json(_load_json(path))


def load_palette(path: str | Path) -> Palette:
    return palette_from_json(_load_json(path))


def _load_json(path: str | Path) -> dict:
    try:
        return json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as e:
        raise FileFormatError(f"{path}: not valid JSON ({e})") from e


def parse_responses_csv(text: str, q: Questionnaire) -> list[ParticipantRecord]:
    """Header is participant_id plus one column per question; cells are
    0-based option indices. Accepts LF or CRLF."""
    reader = csv.reader(io.StringIO(text, newline=""))
    rows = [row for row in reader if row]
    if not rows:
        raise FileFormatError("responses CSV is empty")
    header = rows[0]
    if not header or header[0] != "participant_id":
        raise FileFormatError("responses CSV must start with a participant_id column")
    if len(header) != q.question_count + 1:
        raise FileFormatError(
            f"responses CSV has {len(header) - 1} answer columns, questionnaire has {q.question_count} questions")
    records = []
    for lineno, row in enumerate(rows[1:], start=2):
        if len(row) != len(header):
            raise FileFormatError(f"row {lineno}: expected {len(header)} cells, got {len(row)}")
        try:
            answers = [int(cell.strip()) for cell in row[1:]]
        except ValueError:
            raise FileFormatError(f"row {lineno}: answers must be integer option indices") from None
        records.append(ParticipantRecord(participant_id=row[0], answers=answers))
    return records


def read_responses_csv(path: str | Path, q: Questionnaire) -> list[ParticipantRecord]:
    return parse_responses_csv(Path(path).read_text(encoding="utf-8"), q)


def format_responses_csv(records: list[ParticipantRecord], q: Questionnaire) -> str:
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(["participant_id", *(qu.id for qu in q.questions)])
    for rec in records:
        writer.writerow([rec.participant_id, *rec.answers])
    return out.getvalue()


def write_responses_csv(path: str | Path, records: list[ParticipantRecord], q: Questionnaire) -> None:
    Path(path).write_text(format_responses_csv(records, q), encoding="utf-8")


def diagnostics_to_json(diagnostics: list[Diagnostic]) -> dict:
    return {"diagnostics": [d.to_json() for d in diagnostics]}


def write_diagnostics_json(path: str | Path, diagnostics: list[Diagnostic]) -> None:
    Path(path).write_text(json.dumps(diagnostics_to_json(diagnostics), indent=2) + "\n", encoding="utf-8")
