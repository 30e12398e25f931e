import json
from pathlib import Path

import pytest

from loomcode.cli import main
from loomcode.encode import ColorGrid
from loomcode.fileio import palette_to_json, questionnaire_to_json
from loomcode.ppm import grid_to_image, write_ppm_file
from loomcode.wif import parse_wif
from support import AZURE, CRIMSON, GOLD, STONE, desk_palette, desk_questionnaire


@pytest.fixture
def fixtures(tmp_path):
    qfile = tmp_path / "q.json"
    pfile = tmp_path / "p.json"
    rfile = tmp_path / "r.csv"
    qfile.write_text(json.dumps(questionnaire_to_json(desk_questionnaire())))
    pfile.write_text(json.dumps(palette_to_json(desk_palette())))
    rfile.write_text("participant_id,q1,q2,q3\nA,0,1,2\nB,2,2,0\n")
    return tmp_path, qfile, pfile, rfile


class TestEncode:
    def test_encode_to_wif(self, fixtures):
        tmp, qfile, pfile, rfile = fixtures
        out = tmp / "d.wif"
        code = main(["encode", "--questionnaire", str(qfile), "--responses", str(rfile),
                     "--palette", str(pfile), "--out-wif", str(out)])
        assert code == 0
        parsed = parse_wif(out.read_text())
        assert len(parsed.draft.picks) == 7
        assert [p.color.rgb for p in parsed.draft.picks] == [
            CRIMSON.rgb, GOLD.rgb, AZURE.rgb, STONE.rgb, AZURE.rgb, AZURE.rgb, CRIMSON.rgb,
        ]

    def test_encode_deterministic(self, fixtures):
        tmp, qfile, pfile, rfile = fixtures
        outputs = []
        for name in ["a.wif", "b.wif"]:
            out = tmp / name
            assert main(["encode", "--questionnaire", str(qfile), "--responses", str(rfile),
                         "--palette", str(pfile), "--out-wif", str(out),
                         "--out-svg", str(tmp / (name + ".svg"))]) == 0
            outputs.append(out.read_bytes())
        assert outputs[0] == outputs[1]
        assert (tmp / "a.wif.svg").read_bytes() == (tmp / "b.wif.svg").read_bytes()

    def test_wif_date_flag(self, fixtures):
        tmp, qfile, pfile, rfile = fixtures
        out = tmp / "d.wif"
        assert main(["encode", "--questionnaire", str(qfile), "--responses", str(rfile),
                     "--palette", str(pfile), "--out-wif", str(out),
                     "--wif-date", "March 3, 2026"]) == 0
        assert "Date=March 3, 2026" in out.read_text()

    def test_missing_input_file(self, fixtures, capsys):
        tmp, qfile, pfile, _ = fixtures
        code = main(["encode", "--questionnaire", str(qfile), "--responses", str(tmp / "absent.csv"),
                     "--palette", str(pfile)])
        assert code == 1
        assert "error:" in capsys.readouterr().err

    def test_invalid_responses(self, fixtures, capsys):
        tmp, qfile, pfile, _ = fixtures
        bad = tmp / "bad.csv"
        bad.write_text("participant_id,q1,q2,q3\nA,0,1,9\n")
        code = main(["encode", "--questionnaire", str(qfile), "--responses", str(bad),
                     "--palette", str(pfile)])
        assert code == 1
        assert "OptionOutOfRange" in capsys.readouterr().err


class TestDecode:
    def test_round_trip_positionally(self, fixtures):
        tmp, qfile, pfile, rfile = fixtures
        ppm = tmp / "chart.ppm"
        assert main(["encode", "--questionnaire", str(qfile), "--responses", str(rfile),
                     "--palette", str(pfile), "--out-ppm", str(ppm)]) == 0
        out = tmp / "decoded.csv"
        diag = tmp / "diag.json"
        code = main(["decode", "--image", str(ppm), "--geometry", "7,24,0,0,10,10",
                     "--questionnaire", str(qfile), "--palette", str(pfile),
                     "--out", str(out), "--diagnostics", str(diag)])
        assert code == 0
        original = [line.split(",")[1:] for line in rfile.read_text().splitlines()[1:]]
        decoded = [line.split(",")[1:] for line in out.read_text().splitlines()[1:]]
        assert decoded == original
        assert json.loads(diag.read_text()) == {"diagnostics": []}

    def test_partial_decode_exit_3(self, fixtures):
        tmp, qfile, pfile, _ = fixtures
        cells = []
        for color in [CRIMSON, GOLD, AZURE, STONE, CRIMSON]:  # second block is short
            cells += [color.rgb] * 24
        write_ppm_file(tmp / "bad.ppm", grid_to_image(ColorGrid(5, 24, cells), 10))
        out = tmp / "decoded.csv"
        diag = tmp / "diag.json"
        code = main(["decode", "--image", str(tmp / "bad.ppm"), "--geometry", "5,24,0,0,10,10",
                     "--questionnaire", str(qfile), "--palette", str(pfile),
                     "--out", str(out), "--diagnostics", str(diag)])
        assert code == 3
        assert out.read_text().splitlines()[1].split(",")[1:] == ["0", "1", "2"]
        issues = [d["issue"] for d in json.loads(diag.read_text())["diagnostics"]]
        assert "BlockLengthMismatch" in issues

    def test_unreadable_image(self, fixtures, capsys):
        tmp, qfile, pfile, _ = fixtures
        (tmp / "junk.ppm").write_bytes(b"not a ppm")
        code = main(["decode", "--image", str(tmp / "junk.ppm"), "--geometry", "1,1,0,0,1,1",
                     "--questionnaire", str(qfile), "--palette", str(pfile),
                     "--out", str(tmp / "o.csv")])
        assert code == 1

    def test_bad_geometry_is_usage_error(self, fixtures):
        tmp, qfile, pfile, _ = fixtures
        code = main(["decode", "--image", "x.ppm", "--geometry", "1,2,3",
                     "--questionnaire", str(qfile), "--palette", str(pfile),
                     "--out", str(tmp / "o.csv")])
        assert code == 2


class TestReportValidate:
    def test_report_table(self, fixtures, capsys):
        _, qfile, pfile, rfile = fixtures
        assert main(["report", "--responses", str(rfile), "--questionnaire", str(qfile)]) == 0
        out = capsys.readouterr().out
        assert "participants: 2" in out
        assert "q1: How connected do you feel today?" in out
        assert "[0] Low: 1" in out
        assert "[2] High: 1" in out

    def test_validate_ok(self, fixtures, capsys):
        _, qfile, pfile, rfile = fixtures
        assert main(["validate", "--questionnaire", str(qfile), "--palette", str(pfile),
                     "--responses", str(rfile)]) == 0
        assert capsys.readouterr().out.strip() == "ok"

    def test_validate_close_colors(self, fixtures, capsys):
        tmp, qfile, pfile, rfile = fixtures
        assert main(["validate", "--questionnaire", str(qfile), "--palette", str(pfile),
                     "--min-distance", "200"]) == 1
        assert "ColorsTooClose" in capsys.readouterr().err


class TestUsage:
    def test_unknown_flag(self, capsys):
        assert main(["--bogus"]) == 2
        assert "usage" in capsys.readouterr().err

    def test_unknown_flag_on_subcommand(self, fixtures, capsys):
        _, qfile, pfile, rfile = fixtures
        code = main(["report", "--responses", str(rfile), "--questionnaire", str(qfile), "--bogus"])
        assert code == 2

    def test_no_subcommand(self, capsys):
        assert main([]) == 2

    def test_help_exits_zero(self, capsys):
        assert main(["--help"]) == 0
        assert "encode" in capsys.readouterr().out
