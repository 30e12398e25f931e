"""Command-line front door: batch encode/decode/report/validate plus serve.

Exit codes: 0 success, 1 I/O or validation failure, 2 usage error,
3 decode completed but at least one participant block failed.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import __version__
from .decode import DecodeConfig, GeometryError, GridGeometry, ShapeError, decode_image
from .encode import EncodeConfig, PaletteTooSmall, ValidationFailed, encode_session, export_svg, render_chart
from .fileio import (
    FileFormatError,
    load_palette,
    load_questionnaire,
    read_responses_csv,
    write_diagnostics_json,
    write_responses_csv,
)
from .model import check_palette_covers, validate_palette, validate_questionnaire, validate_record
from .ppm import UnreadableImage, grid_to_image, read_ppm_file, write_ppm_file
from .session import tally
from .wif import WifError, WifMetadata, emit_wif


def _geometry(text: str) -> GridGeometry:
    parts = text.split(",")
    if len(parts) != 6:
        raise argparse.ArgumentTypeError(f"geometry must be rows,cols,ox,oy,cw,ch, got {text!r}")
    try:
        rows, cols, ox, oy, cw, ch = (int(p) for p in parts)
    except ValueError:
        raise argparse.ArgumentTypeError(f"geometry fields must be integers, got {text!r}") from None
    return GridGeometry(rows=rows, cols=cols, origin_x=ox, origin_y=oy, cell_w=cw, cell_h=ch)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="loomcode", description=__doc__)
    parser.add_argument("--version", action="version", version=f"loomcode {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    enc = sub.add_parser("encode", help="compile a responses CSV into a weaving draft")
    enc.add_argument("--questionnaire", required=True)
    enc.add_argument("--responses", required=True)
    enc.add_argument("--palette", required=True)
    enc.add_argument("--out-wif")
    enc.add_argument("--out-svg")
    enc.add_argument("--out-ppm")
    enc.add_argument("--warp-ends", type=int, default=24)
    enc.add_argument("--picks-per-answer", type=int, default=1)
    enc.add_argument("--boundary-picks", type=int, default=1)
    enc.add_argument("--rows-per-pick", type=int, default=1)
    enc.add_argument("--cell-px", type=int, default=10, help="cell size for --out-svg/--out-ppm")
    enc.add_argument("--wif-date", default=WifMetadata().date, help="Date line for the WIF header")

    dec = sub.add_parser("decode", help="read records back from a chart image (PPM)")
    dec.add_argument("--image", required=True)
    dec.add_argument("--geometry", required=True, type=_geometry, metavar="rows,cols,ox,oy,cw,ch")
    dec.add_argument("--questionnaire", required=True)
    dec.add_argument("--palette", required=True)
    dec.add_argument("--out", required=True)
    dec.add_argument("--diagnostics")
    dec.add_argument("--rows-per-pick", type=int, default=1)
    dec.add_argument("--picks-per-answer", type=int, default=1)
    dec.add_argument("--boundary-picks", type=int, default=1)
    dec.add_argument("--confidence-threshold", type=float, default=0.6)

    rep = sub.add_parser("report", help="print per-question frequency counts")
    rep.add_argument("--responses", required=True)
    rep.add_argument("--questionnaire", required=True)

    val = sub.add_parser("validate", help="check questionnaire/palette/responses files")
    val.add_argument("--questionnaire", required=True)
    val.add_argument("--palette", required=True)
    val.add_argument("--responses")
    val.add_argument("--min-distance", type=float, default=64.0)

    srv = sub.add_parser("serve", help="run the session HTTP API")
    srv.add_argument("--port", type=int, default=8080)
    srv.add_argument("--host", default="127.0.0.1")
    srv.add_argument("--data-dir", help="overrides LOOM_DATA_DIR")
    srv.add_argument("--ui-dir", help="serve a built facilitator UI from this directory")

    return parser


def _cmd_encode(args) -> int:
    questionnaire = load_questionnaire(args.questionnaire)
    palette = load_palette(args.palette)
    records = read_responses_csv(args.responses, questionnaire)
    config = EncodeConfig(warp_ends=args.warp_ends, picks_per_answer=args.picks_per_answer,
                          boundary_picks=args.boundary_picks)
    draft = encode_session(questionnaire, palette, records, config)
    if args.out_wif:
        metadata = WifMetadata(source_version=__version__, date=args.wif_date)
        Path(args.out_wif).write_text(emit_wif(draft, palette, metadata), encoding="utf-8")
    if args.out_svg or args.out_ppm:
        grid = render_chart(draft, rows_per_pick=args.rows_per_pick)
        if args.out_svg:
            Path(args.out_svg).write_text(export_svg(grid, args.cell_px), encoding="utf-8")
        if args.out_ppm:
            write_ppm_file(args.out_ppm, grid_to_image(grid, args.cell_px))
    print(f"encoded {len(records)} record(s) into {len(draft.picks)} picks")
    return 0


def _cmd_decode(args) -> int:
    questionnaire = load_questionnaire(args.questionnaire)
    palette = load_palette(args.palette)
    image = read_ppm_file(args.image)
    config = DecodeConfig(rows_per_pick=args.rows_per_pick, picks_per_answer=args.picks_per_answer,
                          boundary_picks=args.boundary_picks, confidence_threshold=args.confidence_threshold)
    result = decode_image(image, args.geometry, questionnaire, palette, config)
    write_responses_csv(args.out, result.records, questionnaire)
    if args.diagnostics:
        write_diagnostics_json(args.diagnostics, result.diagnostics)
    for d in result.diagnostics:
        print(f"warning: {d.to_json()}", file=sys.stderr)
    print(f"decoded {len(result.records)} record(s), {len(result.diagnostics)} diagnostic(s)")
    return 3 if result.has_block_failures else 0


def _cmd_report(args) -> int:
    questionnaire = load_questionnaire(args.questionnaire)
    records = read_responses_csv(args.responses, questionnaire)
    issues = validate_questionnaire(questionnaire)
    for rec in records:
        issues += validate_record(questionnaire, rec)
    if issues:
        for issue in issues:
            print(issue, file=sys.stderr)
        return 1
    result = tally(questionnaire, [(qi, oi) for rec in records for qi, oi in enumerate(rec.answers)],
                   len(records))
    print(f"participants: {result.participants_total}")
    for qu, t in zip(questionnaire.questions, result.questions):
        print(f"{t.question_id}: {t.prompt}")
        print(f"  answered: {t.answered}")
        for opt in qu.options:
            print(f"  [{opt.index}] {opt.label}: {t.counts[opt.index]}")
    return 0


def _cmd_validate(args) -> int:
    questionnaire = load_questionnaire(args.questionnaire)
    palette = load_palette(args.palette)
    issues = validate_questionnaire(questionnaire)
    issues += validate_palette(palette, args.min_distance)
    issues += check_palette_covers(palette, questionnaire)
    if args.responses:
        for rec in read_responses_csv(args.responses, questionnaire):
            issues += validate_record(questionnaire, rec)
    if issues:
        for issue in issues:
            print(issue, file=sys.stderr)
        return 1
    print("ok")
    return 0


def _cmd_serve(args) -> int:
    import uvicorn

    from .service import create_app

    app = create_app(data_dir=args.data_dir, ui_dir=args.ui_dir)
    uvicorn.run(app, host=args.host, port=args.port, log_level="warning")
    return 0


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:  # argparse exits 2 on usage errors, 0 on --help
        return int(e.code or 0)
    commands = {
        "encode": _cmd_encode,
        "decode": _cmd_decode,
        "report": _cmd_report,
        "validate": _cmd_validate,
        "serve": _cmd_serve,
    }
    try:
        return commands[args.command](args)
    except (FileFormatError, ValidationFailed, PaletteTooSmall, WifError,
            UnreadableImage, GeometryError, ShapeError, OSError, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
