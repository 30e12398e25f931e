"""Event-sourced live sessions: an append-only event log per session whose
fold reconstructs the state, plus the live reads a facilitator needs
(next yarn picks, scroll preview, aggregate report).

Answers are immutable events; re-answering a question is rejected with
DuplicateAnswer because the physical scroll cannot be unwoven. Freeform
sessions log spontaneous yarn picks and have no data semantics.
"""

from __future__ import annotations

import json
import threading
import uuid
from dataclasses import dataclass, field, replace
from datetime import datetime, timezone
from pathlib import Path

from .encode import ColorGrid, EncodeConfig, WeavingDraft, WeftPick, encode_session, render_chart
from .fileio import (
    FileFormatError,
    palette_from_json,
    palette_to_json,
    questionnaire_from_json,
    questionnaire_to_json,
)
from .model import Palette, ParticipantRecord, Questionnaire, Rgb

MODE_DATA = "data"
MODE_FREEFORM = "freeform"

EV_CREATED = "created"
EV_PARTICIPANT_ADDED = "participant_added"
EV_ANSWER_RECORDED = "answer_recorded"
EV_FREEFORM_PICK = "freeform_pick_recorded"
EV_CLOSED = "closed"


class EventRejected(Exception):
    def __init__(self, code: str, detail: str):
        super().__init__(f"{code}: {detail}")
        self.code = code
        self.detail = detail


class CorruptLog(Exception):
    def __init__(self, seq: int, reason: str):
        super().__init__(f"event {seq}: {reason}")
        self.seq = seq
        self.reason = reason


@dataclass(frozen=True)
class SessionConfig:
    warp_ends: int = 24
    picks_per_answer: int = 1
    boundary_picks: int = 1
    rows_per_pick: int = 1

    def encode_config(self) -> EncodeConfig:
        return EncodeConfig(self.warp_ends, self.picks_per_answer, self.boundary_picks)

    def to_json(self) -> dict:
        return {
            "warp_ends": self.warp_ends,
            "picks_per_answer": self.picks_per_answer,
            "boundary_picks": self.boundary_picks,
            "rows_per_pick": self.rows_per_pick,
        }

    @classmethod
    def from_json(cls, obj: dict) -> "SessionConfig":
        cfg = cls(**{k: int(v) for k, v in obj.items() if k in cls.__dataclass_fields__})
        if min(cfg.warp_ends, cfg.picks_per_answer, cfg.boundary_picks, cfg.rows_per_pick) < 1:
            raise ValueError("session config values must be >= 1")
        return cfg


@dataclass(frozen=True)
class SessionEvent:
    seq: int
    ts: str
    kind: str
    data: dict

    def to_json(self) -> dict:
        return {"seq": self.seq, "ts": self.ts, "kind": self.kind, "data": self.data}

    @classmethod
    def from_json(cls, obj: dict) -> "SessionEvent":
        return cls(seq=int(obj["seq"]), ts=str(obj["ts"]), kind=str(obj["kind"]), data=dict(obj["data"]))


@dataclass
class Participant:
    participant_id: str
    label: str
    answers: dict[int, int] = field(default_factory=dict)  # question index -> option index


@dataclass
class SessionState:
    id: str
    questionnaire: Questionnaire
    palette: Palette
    mode: str
    config: SessionConfig
    participants: list[Participant] = field(default_factory=list)
    freeform_picks: list[tuple[str, str]] = field(default_factory=list)  # (participant_id, color name)
    closed: bool = False
    last_seq: int = 0

    def participant(self, pid: str) -> Participant | None:
        for p in self.participants:
            if p.participant_id == pid:
                return p
        return None

    def is_complete(self, p: Participant) -> bool:
        return len(p.answers) == self.questionnaire.question_count

    def completed_records(self) -> list[ParticipantRecord]:
        """Fully-answered participants, in insertion order, as records."""
        records = []
        for p in self.participants:
            if self.is_complete(p):
                records.append(ParticipantRecord(p.participant_id, [p.answers[i] for i in sorted(p.answers)]))
        return records


def _clone(state: SessionState) -> SessionState:
    return replace(
        state,
        participants=[Participant(p.participant_id, p.label, dict(p.answers)) for p in state.participants],
        freeform_picks=list(state.freeform_picks),
    )


def apply_event(state: SessionState | None, e: SessionEvent) -> SessionState:
    """Fold one event; raises EventRejected (leaving state untouched) on rule violations."""
    if e.kind == EV_CREATED:
        if state is not None:
            raise EventRejected("InvalidEvent", "created must be the first event")
        data = e.data
        mode = data.get("mode", MODE_DATA)
        if mode not in (MODE_DATA, MODE_FREEFORM):
            raise EventRejected("InvalidEvent", f"unknown mode {mode!r}")
        return SessionState(
            id=str(data["session_id"]),
            questionnaire=questionnaire_from_json(data["questionnaire"]),
            palette=palette_from_json(data["palette"]),
            mode=mode,
            config=SessionConfig.from_json(data.get("config", {})),
            last_seq=e.seq,
        )

    if state is None:
        raise EventRejected("InvalidEvent", f"{e.kind} before created")
    if state.closed:
        raise EventRejected("SessionClosed", "session is closed")

    new = _clone(state)
    new.last_seq = e.seq
    data = e.data

    if e.kind == EV_PARTICIPANT_ADDED:
        pid = str(data["participant_id"])
        if new.participant(pid) is not None:
            raise EventRejected("DuplicateParticipant", f"participant {pid!r} already exists")
        new.participants.append(Participant(pid, str(data.get("label", pid))))
        return new

    if e.kind == EV_ANSWER_RECORDED:
        if state.mode != MODE_DATA:
            raise EventRejected("ModeMismatch", "answers are only recorded in data mode")
        pid = str(data["participant_id"])
        p = new.participant(pid)
        if p is None:
            raise EventRejected("UnknownParticipant", f"no participant {pid!r}")
        qi = int(data["question_index"])
        oi = int(data["option_index"])
        if qi < 0 or qi >= state.questionnaire.question_count:
            raise EventRejected("InvalidAnswer", f"question index {qi} out of range")
        if oi < 0 or oi >= state.questionnaire.questions[qi].option_count:
            raise EventRejected("InvalidAnswer", f"option {oi} out of range for question {qi}")
        if qi in p.answers:
            raise EventRejected("DuplicateAnswer", f"participant {pid!r} already answered question {qi}")
        p.answers[qi] = oi
        return new

    if e.kind == EV_FREEFORM_PICK:
        if state.mode != MODE_FREEFORM:
            raise EventRejected("ModeMismatch", "freeform picks are only recorded in freeform mode")
        pid = str(data["participant_id"])
        if new.participant(pid) is None:
            raise EventRejected("UnknownParticipant", f"no participant {pid!r}")
        name = str(data["color_name"])
        known = {c.name for c in [*state.palette.option_colors, state.palette.boundary, state.palette.warp]}
        if name not in known:
            raise EventRejected("InvalidAnswer", f"color {name!r} is not in the palette")
        new.freeform_picks.append((pid, name))
        return new

    if e.kind == EV_CLOSED:
        new.closed = True
        return new

    raise EventRejected("InvalidEvent", f"unknown event kind {e.kind!r}")


def replay(events: list[SessionEvent]) -> SessionState:
    """Left-fold of apply_event over a stored log; any rejection means the log is corrupt."""
    if not events:
        raise CorruptLog(0, "empty log")
    state: SessionState | None = None
    expected = 1
    for e in events:
        if e.seq != expected:
            raise CorruptLog(e.seq, "gap")
        try:
            state = apply_event(state, e)
        except EventRejected as r:
            raise CorruptLog(e.seq, str(r)) from r
        except (KeyError, TypeError, ValueError, FileFormatError) as r:
            raise CorruptLog(e.seq, f"bad event payload: {r}") from r
        expected += 1
    assert state is not None
    return state


@dataclass(frozen=True)
class PickInstruction:
    yarn: str
    rgb: Rgb
    count: int
    purpose: str  # "answer" | "boundary"
    prompt: str | None = None

    def to_json(self) -> dict:
        return {"yarn": self.yarn, "rgb": list(self.rgb), "count": self.count,
                "purpose": self.purpose, "prompt": self.prompt}


def _current_participant(state: SessionState) -> Participant | None:
    """The participant whose picks are on the loom: the latest one, in
    insertion order, with at least one recorded answer."""
    current = None
    for p in state.participants:
        if p.answers:
            current = p
    return current


def next_picks(state: SessionState) -> list[PickInstruction]:
    """Yarn instructions for the current participant: one per answered question
    in question order, then a boundary run once they finish, unless they are
    the last participant."""
    if state.mode != MODE_DATA:
        raise EventRejected("ModeMismatch", "next_picks requires a data session")
    if state.closed:
        return []
    current = _current_participant(state)
    if current is None:
        return []
    cfg = state.config
    instructions = []
    for qi in sorted(current.answers):
        option = current.answers[qi]
        color = state.palette.color_for_option(option)
        instructions.append(PickInstruction(
            yarn=color.name, rgb=color.rgb, count=cfg.picks_per_answer,
            purpose="answer", prompt=state.questionnaire.questions[qi].prompt,
        ))
    is_last = state.participants[-1].participant_id == current.participant_id
    if state.is_complete(current) and not is_last:
        instructions.append(PickInstruction(
            yarn=state.palette.boundary.name, rgb=state.palette.boundary.rgb,
            count=cfg.boundary_picks, purpose="boundary",
        ))
    return instructions


def preview_draft(state: SessionState) -> WeavingDraft:
    """Draft of everything woven so far: each participant's answered questions
    in question order, with a boundary run after every fully-answered
    participant that is not the last one."""
    cfg = state.config
    picks: list[WeftPick] = []
    last_index = len(state.participants) - 1
    for pi, p in enumerate(state.participants):
        for qi in sorted(p.answers):
            pick = WeftPick.data(state.palette.color_for_option(p.answers[qi]), pi, qi)
            picks.extend([pick] * cfg.picks_per_answer)
        if state.is_complete(p) and pi != last_index:
            picks.extend([WeftPick.boundary(state.palette.boundary)] * cfg.boundary_picks)
    return WeavingDraft(
        warp_ends=cfg.warp_ends, warp_color=state.palette.warp, picks=picks,
        picks_per_answer=cfg.picks_per_answer, boundary_picks=cfg.boundary_picks,
    )


def preview(state: SessionState) -> ColorGrid:
    if state.mode != MODE_DATA:
        raise EventRejected("ModeMismatch", "preview requires a data session")
    return render_chart(preview_draft(state), rows_per_pick=state.config.rows_per_pick)


def session_draft(state: SessionState) -> WeavingDraft:
    """Draft over the fully-answered participants only (the exportable data)."""
    return encode_session(state.questionnaire, state.palette, state.completed_records(),
                          state.config.encode_config())


@dataclass
class QuestionTally:
    question_id: str
    prompt: str
    counts: list[int]  # indexed by option

    @property
    def answered(self) -> int:
        return sum(self.counts)

    def to_json(self) -> dict:
        return {"question_id": self.question_id, "prompt": self.prompt,
                "answered": self.answered, "counts": self.counts}


@dataclass
class Report:
    participants_total: int
    questions: list[QuestionTally]

    def to_json(self) -> dict:
        return {"participants_total": self.participants_total,
                "questions": [t.to_json() for t in self.questions]}


def tally(q: Questionnaire, answers: list[tuple[int, int]], participants_total: int) -> Report:
    """Frequency counts per question per option over (question, option) pairs."""
    tallies = [QuestionTally(qu.id, qu.prompt, [0] * qu.option_count) for qu in q.questions]
    for qi, oi in answers:
        tallies[qi].counts[oi] += 1
    return Report(participants_total=participants_total, questions=tallies)


def report(state: SessionState) -> Report:
    if state.mode != MODE_DATA:
        raise EventRejected("ModeMismatch", "reports require a data session")
    answers = [(qi, oi) for p in state.participants for qi, oi in p.answers.items()]
    return tally(state.questionnaire, answers, len(state.participants))


def _now_iso() -> str:
    return datetime.now(timezone.utc).isoformat(timespec="seconds")


class SessionStore:
    """One append-only JSONL log file per session (file name = session id).

    Mutations to one session are serialized by a per-session lock; reads of
    the cached state are safe alongside them because states are replaced,
    never mutated in place.
    """

    def __init__(self, data_dir: str | Path):
        self.data_dir = Path(data_dir)
        self.data_dir.mkdir(parents=True, exist_ok=True)
        self._states: dict[str, SessionState] = {}
        self._locks: dict[str, threading.Lock] = {}
        self._registry_lock = threading.Lock()

    def _lock(self, session_id: str) -> threading.Lock:
        with self._registry_lock:
            return self._locks.setdefault(session_id, threading.Lock())

    def _path(self, session_id: str) -> Path:
        return self.data_dir / session_id

    def create(self, questionnaire: Questionnaire, palette: Palette, mode: str,
               config: SessionConfig) -> SessionState:
        session_id = uuid.uuid4().hex
        data = {
            "session_id": session_id,
            "mode": mode,
            "questionnaire": questionnaire_to_json(questionnaire),
            "palette": palette_to_json(palette),
            "config": config.to_json(),
        }
        event = SessionEvent(seq=1, ts=_now_iso(), kind=EV_CREATED, data=data)
        state = apply_event(None, event)
        with self._lock(session_id):
            self._append_line(session_id, event)
            self._states[session_id] = state
        return state

    def get(self, session_id: str) -> SessionState | None:
        state = self._states.get(session_id)
        if state is not None:
            return state
        if not session_id.isalnum():  # ids are uuid hex; path separators never reach disk
            return None
        path = self._path(session_id)
        if not path.exists():
            return None
        state = replay(self.events(session_id))
        self._states[session_id] = state
        return state

    def append(self, session_id: str, kind: str, data: dict) -> SessionState:
        with self._lock(session_id):
            state = self.get(session_id)
            if state is None:
                raise KeyError(session_id)
            event = SessionEvent(seq=state.last_seq + 1, ts=_now_iso(), kind=kind, data=data)
            new_state = apply_event(state, event)  # EventRejected propagates; nothing persisted
            self._append_line(session_id, event)
            self._states[session_id] = new_state
            return new_state

    def events(self, session_id: str) -> list[SessionEvent]:
        events = []
        raw = self._path(session_id).read_text(encoding="utf-8")
        for lineno, line in enumerate(raw.splitlines(), start=1):
            if not line.strip():
                continue
            try:
                events.append(SessionEvent.from_json(json.loads(line)))
            except (ValueError, KeyError) as e:
                raise CorruptLog(lineno, f"unreadable event line: {e}") from e
        return events

    def list_ids(self) -> list[str]:
        return sorted(p.name for p in self.data_dir.iterdir() if p.is_file())

    def _append_line(self, session_id: str, event: SessionEvent) -> None:
        with self._path(session_id).open("a", encoding="utf-8") as f:
            f.write(json.dumps(event.to_json(), separators=(",", ":")) + "\n")
