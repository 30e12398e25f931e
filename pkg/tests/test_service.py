import json
import re

import pytest
from fastapi.testclient import TestClient

from loomcode.fileio import palette_to_json, questionnaire_to_json
from loomcode.service import create_app
from loomcode.wif import parse_wif
from support import desk_palette, desk_questionnaire


@pytest.fixture
def client(tmp_path):
    app = create_app(data_dir=tmp_path)
    return TestClient(app)


def create_session(client, mode="data", config=None):
    response = client.post("/api/sessions", json={
        "questionnaire": questionnaire_to_json(desk_questionnaire()),
        "palette": palette_to_json(desk_palette()),
        "mode": mode,
        "config": config or {},
    })
    assert response.status_code == 201, response.text
    return response.json()["session_id"]


def add_participant(client, sid, label):
    response = client.post(f"/api/sessions/{sid}/participants", json={"label": label})
    assert response.status_code == 201
    return response.json()["participant_id"]


def answer(client, sid, pid, qi, oi):
    return client.post(f"/api/sessions/{sid}/answers",
                       json={"participant_id": pid, "question_index": qi, "option_index": oi})


def svg_rows(svg_text, cell_px):
    height = int(re.search(r'height="(\d+)"', svg_text).group(1))
    return height // cell_px


class TestSessionLifecycle:
    def test_create_and_get(self, client):
        sid = create_session(client)
        view = client.get(f"/api/sessions/{sid}").json()
        assert view["session_id"] == sid
        assert view["mode"] == "data"
        assert view["participants"] == []
        assert view["config"]["warp_ends"] == 24
        assert view["current_participant_id"] is None

    def test_full_desk_flow(self, client):
        sid = create_session(client)
        p1 = add_participant(client, sid, "Ana")
        p2 = add_participant(client, sid, "Ben")
        assert (p1, p2) == ("p1", "p2")

        for qi, oi in enumerate([0, 1, 2]):
            assert answer(client, sid, p1, qi, oi).status_code == 204
        picks = client.get(f"/api/sessions/{sid}/next-picks").json()["picks"]
        assert [p["yarn"] for p in picks] == ["Crimson", "Gold", "Azure", "Stone"]
        assert picks[-1]["purpose"] == "boundary"
        assert picks[0]["rgb"] == [220, 50, 47]

        for qi, oi in enumerate([2, 2, 0]):
            assert answer(client, sid, p2, qi, oi).status_code == 204

        view = client.get(f"/api/sessions/{sid}").json()
        assert view["participants"][0]["answers"] == {"0": 0, "1": 1, "2": 2}
        assert view["current_participant_id"] is None

        body = client.get(f"/api/sessions/{sid}/report").json()
        assert body["participants_total"] == 2
        assert body["questions"][0]["counts"] == [1, 0, 1]

        wif_text = client.get(f"/api/sessions/{sid}/draft.wif").text
        parsed = parse_wif(wif_text)
        assert len(parsed.draft.picks) == 7

        assert client.post(f"/api/sessions/{sid}/close").status_code == 204
        assert client.get(f"/api/sessions/{sid}").json()["closed"] is True
        assert client.get(f"/api/sessions/{sid}/next-picks").json()["picks"] == []

    def test_preview_grows_row_by_row(self, client):
        sid = create_session(client)
        p1 = add_participant(client, sid, "Ana")
        p2 = add_participant(client, sid, "Ben")
        rows = []
        for pid, answers in [(p1, [0, 1, 2]), (p2, [2, 2, 0])]:
            for qi, oi in enumerate(answers):
                answer(client, sid, pid, qi, oi)
                svg = client.get(f"/api/sessions/{sid}/preview.svg?cell_px=10").text
                rows.append(svg_rows(svg, 10))
        # the boundary row appears as soon as Ana finishes with Ben queued
        assert rows == [1, 2, 4, 5, 6, 7]

    def test_persistence_across_restart(self, client, tmp_path):
        sid = create_session(client)
        p1 = add_participant(client, sid, "Ana")
        answer(client, sid, p1, 0, 2)
        fresh = TestClient(create_app(data_dir=tmp_path))
        view = fresh.get(f"/api/sessions/{sid}").json()
        assert view["participants"][0]["answers"] == {"0": 2}


class TestFreeform:
    def test_freeform_picks_and_mode_errors(self, client):
        sid = create_session(client, mode="freeform")
        p1 = add_participant(client, sid, "Ana")
        ok = client.post(f"/api/sessions/{sid}/freeform-picks",
                         json={"participant_id": p1, "color_name": "Gold"})
        assert ok.status_code == 204
        view = client.get(f"/api/sessions/{sid}").json()
        assert view["freeform_picks"] == [{"participant_id": "p1", "color_name": "Gold"}]

        rejected = answer(client, sid, p1, 0, 0)
        assert rejected.status_code == 409
        assert rejected.json()["error"] == "ModeMismatch"
        for path in ["next-picks", "report", "preview.svg", "draft.wif"]:
            response = client.get(f"/api/sessions/{sid}/{path}")
            assert response.status_code == 409, path
            assert response.json()["error"] == "ModeMismatch"

    def test_freeform_pick_in_data_mode(self, client):
        sid = create_session(client)
        p1 = add_participant(client, sid, "Ana")
        response = client.post(f"/api/sessions/{sid}/freeform-picks",
                               json={"participant_id": p1, "color_name": "Gold"})
        assert response.status_code == 409
        assert response.json()["error"] == "ModeMismatch"


class TestErrors:
    def test_unknown_session(self, client):
        response = client.get("/api/sessions/nope")
        assert response.status_code == 404
        assert response.json() == {"error": "UnknownSession", "detail": "no session 'nope'"}

    def test_unknown_participant(self, client):
        sid = create_session(client)
        response = answer(client, sid, "ghost", 0, 0)
        assert response.status_code == 404
        assert response.json()["error"] == "UnknownParticipant"

    def test_duplicate_answer(self, client):
        sid = create_session(client)
        p1 = add_participant(client, sid, "Ana")
        assert answer(client, sid, p1, 0, 0).status_code == 204
        response = answer(client, sid, p1, 0, 1)
        assert response.status_code == 409
        assert response.json()["error"] == "DuplicateAnswer"

    def test_invalid_answer(self, client):
        sid = create_session(client)
        p1 = add_participant(client, sid, "Ana")
        response = answer(client, sid, p1, 0, 99)
        assert response.status_code == 400
        assert response.json()["error"] == "InvalidAnswer"

    def test_closed_session_conflict(self, client):
        sid = create_session(client)
        add_participant(client, sid, "Ana")
        client.post(f"/api/sessions/{sid}/close")
        response = answer(client, sid, "p1", 0, 0)
        assert response.status_code == 409
        assert response.json()["error"] == "SessionClosed"

    def test_validation_failed_on_create(self, client):
        palette = palette_to_json(desk_palette())
        palette["boundary"]["rgb"] = palette["option_colors"][0]["rgb"]
        response = client.post("/api/sessions", json={
            "questionnaire": questionnaire_to_json(desk_questionnaire()),
            "palette": palette,
        })
        assert response.status_code == 400
        body = response.json()
        assert body["error"] == "ValidationFailed"
        assert "DuplicateColor" in body["detail"]

    def test_bad_mode(self, client):
        response = client.post("/api/sessions", json={
            "questionnaire": questionnaire_to_json(desk_questionnaire()),
            "palette": palette_to_json(desk_palette()),
            "mode": "chaotic",
        })
        assert response.status_code == 400
        assert response.json()["error"] == "InvalidRequest"

    def test_malformed_body(self, client):
        response = client.post("/api/sessions", content=b"not json",
                               headers={"content-type": "application/json"})
        assert response.status_code == 400
        assert response.json()["error"] == "InvalidRequest"

    def test_empty_label(self, client):
        sid = create_session(client)
        response = client.post(f"/api/sessions/{sid}/participants", json={"label": ""})
        assert response.status_code == 400
