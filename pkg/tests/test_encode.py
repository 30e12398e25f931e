import re
import xml.etree.ElementTree as ET

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from loomcode.encode import (
    ColorGrid,
    EncodeConfig,
    PaletteTooSmall,
    ValidationFailed,
    encode_session,
    export_svg,
    render_chart,
)
from loomcode.model import ParticipantRecord, Questionnaire, question
from support import AZURE, CRIMSON, GOLD, STONE, group_palette, group_questionnaire, group_records, desk_palette, desk_questionnaire, desk_records


class TestEncodeSession:
    def test_empty_session(self, desk_questionnaire, desk_palette):
        draft = encode_session(desk_questionnaire, desk_palette, [])
        assert draft.picks == []
        assert draft.warp_ends == 24

    def test_desk_example(self, desk_questionnaire, desk_palette, desk_records):
        draft = encode_session(desk_questionnaire, desk_palette, desk_records)
        assert [p.color for p in draft.picks] == [CRIMSON, GOLD, AZURE, STONE, AZURE, AZURE, CRIMSON]
        assert [p.role for p in draft.picks] == ["data"] * 3 + ["boundary"] + ["data"] * 3
        assert [(p.participant_index, p.question_index) for p in draft.picks if not p.is_boundary] == [
            (0, 0), (0, 1), (0, 2), (1, 0), (1, 1), (1, 2),
        ]

    def test_group_scale(self):
        draft = encode_session(group_questionnaire(), group_palette(), group_records())
        assert len(draft.picks) == 251  # 28*8 data picks + 27 boundaries
        assert sum(1 for p in draft.picks if p.is_boundary) == 27

    def test_validation_failure_wraps_issues(self, desk_questionnaire, desk_palette):
        bad = [ParticipantRecord("A", [0, 1])]
        with pytest.raises(ValidationFailed) as exc:
            encode_session(desk_questionnaire, desk_palette, bad)
        assert any(i.code == "AnswerCountMismatch" for i in exc.value.issues)

    def test_palette_too_small(self, desk_palette):
        q = Questionnaire("s", "Survey", [question("q1", "p", ["a", "b", "c", "d"])])
        with pytest.raises(PaletteTooSmall):
            encode_session(q, desk_palette, [])

    @settings(max_examples=60, deadline=None)
    @given(
        n_participants=st.integers(0, 100),
        n_questions=st.integers(1, 20),
        picks_per_answer=st.integers(1, 3),
        boundary_picks=st.integers(1, 3),
        data=st.data(),
    )
    def test_pick_count_law_and_order(self, n_participants, n_questions, picks_per_answer, boundary_picks, data):
        palette = group_palette()
        q = Questionnaire("s", "Survey", [
            question(f"q{i}", f"p{i}", ["a", "b", "c", "d", "e"]) for i in range(n_questions)
        ])
        records = [
            ParticipantRecord(f"p{i}", [data.draw(st.integers(0, 4)) for _ in range(n_questions)])
            for i in range(n_participants)
        ]
        config = EncodeConfig(picks_per_answer=picks_per_answer, boundary_picks=boundary_picks)
        draft = encode_session(q, palette, records, config)
        expected = (n_participants * n_questions * picks_per_answer
                    + max(n_participants - 1, 0) * boundary_picks)
        assert len(draft.picks) == expected
        data_positions = [(p.participant_index, p.question_index)
                          for p in draft.picks if not p.is_boundary]
        # projecting away the picks_per_answer repeats must give the sorted, gapless sequence
        deduped = [data_positions[i] for i in range(0, len(data_positions), picks_per_answer)]
        assert deduped == [(pi, qi) for pi in range(n_participants) for qi in range(n_questions)]
        assert data_positions == [pos for pos in deduped for _ in range(picks_per_answer)]
        # data picks carry the palette color of the recorded answer, exactly
        it = iter(data_positions)
        for p in draft.picks:
            if not p.is_boundary:
                pi, qi = next(it)
                assert p.color == palette.option_colors[records[pi].answers[qi]]

    def test_deterministic(self, desk_questionnaire, desk_palette, desk_records):
        a = encode_session(desk_questionnaire, desk_palette, desk_records)
        b = encode_session(desk_questionnaire, desk_palette, desk_records)
        assert a == b


class TestRenderChart:
    def test_empty_draft(self, desk_questionnaire, desk_palette):
        draft = encode_session(desk_questionnaire, desk_palette, [])
        grid = render_chart(draft)
        assert (grid.rows, grid.cols) == (0, 24)
        assert grid.cells == []

    def test_desk_chart(self, desk_questionnaire, desk_palette, desk_records):
        draft = encode_session(desk_questionnaire, desk_palette, desk_records)
        grid = render_chart(draft)
        assert (grid.rows, grid.cols) == (7, 24)
        for i, pick in enumerate(draft.picks):
            assert grid.row(i) == [pick.color.rgb] * 24

    def test_rows_per_pick(self, desk_questionnaire, desk_palette, desk_records):
        draft = encode_session(desk_questionnaire, desk_palette, desk_records)
        grid = render_chart(draft, rows_per_pick=3)
        assert (grid.rows, grid.cols) == (21, 24)
        for i, pick in enumerate(draft.picks):
            for k in range(3):
                assert grid.row(3 * i + k) == [pick.color.rgb] * 24


class TestExportSvg:
    def test_single_cell(self):
        svg = export_svg(ColorGrid(1, 1, [(255, 0, 0)]), 10)
        root = ET.fromstring(svg)
        assert root.get("width") == "10" and root.get("height") == "10"
        rects = [el for el in root.iter() if el.tag.endswith("rect")]
        assert len(rects) == 1
        assert rects[0].get("fill") == "#ff0000"

    def test_empty_grid(self):
        svg = export_svg(ColorGrid(0, 0, []), 10)
        root = ET.fromstring(svg)
        assert not [el for el in root.iter() if el.tag.endswith("rect")]

    def test_desk_chart_rect_count(self, desk_questionnaire, desk_palette, desk_records):
        draft = encode_session(desk_questionnaire, desk_palette, desk_records)
        grid = render_chart(draft)
        svg = export_svg(grid, 10)
        assert len(re.findall(r"<rect ", svg)) == grid.rows * grid.cols == 168
        root = ET.fromstring(svg)
        assert root.get("width") == str(24 * 10)
        assert root.get("height") == str(7 * 10)
        fills = {el.get("fill") for el in root.iter() if el.tag.endswith("rect")}
        assert all(re.fullmatch(r"#[0-9a-f]{6}", f) for f in fills)
