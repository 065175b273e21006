"""Command-line interface.

Four subcommands:

* ``check``    - verdict for one mask, as a JSON object on stdout;
* ``segment``  - run a segmenter on an image, write the mask;
* ``evaluate`` - batch-run segmenters over a corpus, write JSONL/CSV reports;
* ``overlay``  - render a diagnostic PNG of the extracted curve.

Exit codes: 0 success (any verdict), 1 I/O or decode failure, 2 degenerate
input, 64 usage error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from PIL import Image

from .errors import (
    DecodeError,
    DegenerateInputError,
    JordanMaskError,
    UnsupportedFormatError,
)
from .grid import (
    BinaryImage,
    GrayImage,
    Polarity,
    read_image,
    read_mask,
    resize_nearest,
    write_image,
    zero_pad,
)
from .jordan import JordanVerdict, VerdictCategory, evaluate
from .metrics import compute_metrics, confusion
from .segment import Method, SegmenterConfig, compute_threshold, segment
from .topology import Adjacency, label_mask

__all__ = ["main", "CorpusEntry", "scan_corpus"]

EXIT_OK = 0
EXIT_IO = 1
EXIT_DEGENERATE = 2
EXIT_USAGE = 64

_IMAGE_SUFFIXES = (".jpg", ".jpeg", ".pgm")
_METRIC_KEYS = ("iou", "dice", "precision", "recall", "accuracy")
_CSV_HEADER = (
    "class",
    "entry",
    "method",
    "iou",
    "dice",
    "precision",
    "recall",
    "accuracy",
    "betti_b0",
    "betti_b1",
    "complement_b0",
    "verdict",
    "curve_points",
    "elapsed_ms",
    "error",
)

# Complement components cycle through these; pure red is reserved for the
# curve itself so it is identifiable by exact pixel value.
_PALETTE = (
    (31, 119, 180),
    (255, 127, 14),
    (44, 160, 44),
    (148, 103, 189),
    (140, 86, 75),
    (227, 119, 194),
    (127, 127, 127),
    (188, 189, 34),
    (23, 190, 207),
    (217, 95, 2),
)
_CURVE_COLOR = (255, 0, 0)
_MASK_TINT = (70, 140, 255)


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):  # noqa: D102 - argparse hook
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def _parse_size(text: str) -> tuple[int, int]:
    try:
        w_str, h_str = text.lower().split("x")
        w, h = int(w_str), int(h_str)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected WIDTHxHEIGHT, got {text!r}") from None
    if w < 1 or h < 1:
        raise argparse.ArgumentTypeError(f"size must be positive, got {text!r}")
    return (w, h)


def _build_parser() -> _Parser:
    parser = _Parser(prog="jordanmask", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def add_pipeline_flags(p: _Parser) -> None:
        p.add_argument("--pad", type=int, default=1, metavar="N",
                       help="background margin added around the mask (default 1)")
        p.add_argument("--no-preprocess", action="store_true",
                       help="skip the despeckling pass")

    p_check = sub.add_parser("check", help="classify one mask")
    p_check.add_argument("mask", help="mask file (any nonzero pixel is foreground)")
    p_check.add_argument("--resize", type=_parse_size, default=None, metavar="WxH")
    p_check.add_argument("--self-check", action="store_true",
                         help="recompute Betti numbers via matrix ranks and compare")
    add_pipeline_flags(p_check)
    p_check.set_defaults(func=cmd_check)

    p_seg = sub.add_parser("segment", help="segment a grayscale image")
    p_seg.add_argument("image")
    p_seg.add_argument("--method", "-m", required=True,
                       choices=[m.value for m in Method])
    p_seg.add_argument("--out", "-o", required=True, help="output mask path (.pgm or .png)")
    p_seg.add_argument("--polarity", choices=[p.value for p in Polarity], default="auto")
    p_seg.add_argument("--resize", type=_parse_size, default=None, metavar="WxH")
    p_seg.set_defaults(func=cmd_segment)

    p_eval = sub.add_parser("evaluate", help="evaluate segmenters over a corpus")
    p_eval.add_argument("root", help="corpus root: <root>/<class>/<entry>.{jpg,pgm} + <entry>.png mask")
    p_eval.add_argument("--methods", default="",
                        help="comma-separated segmenters (ground truth is always "
                             "evaluated as method 'annotation')")
    p_eval.add_argument("--resize", type=_parse_size, default=(64, 64), metavar="WxH")
    p_eval.add_argument("--format", choices=["jsonl", "csv", "both"], default="both")
    p_eval.add_argument("--out", default="report", help="output path stem (default: report)")
    p_eval.add_argument("--polarity", choices=[p.value for p in Polarity], default="auto")
    p_eval.add_argument("--strict", action="store_true",
                        help="exit nonzero when any entry produced an error record")
    p_eval.add_argument("--timings", action="store_true",
                        help="record real wall-clock elapsed_ms (output no longer "
                             "byte-reproducible); default writes 0.0")
    p_eval.add_argument("--seed", type=int, default=0, help="reserved")
    add_pipeline_flags(p_eval)
    p_eval.set_defaults(func=cmd_evaluate)

    p_ovl = sub.add_parser("overlay", help="render curve/region diagnostic image")
    p_ovl.add_argument("image")
    p_ovl.add_argument("mask")
    p_ovl.add_argument("--out", "-o", required=True, help="output PNG path")
    p_ovl.add_argument("--resize", type=_parse_size, default=None, metavar="WxH")
    add_pipeline_flags(p_ovl)
    p_ovl.set_defaults(func=cmd_overlay)

    return parser


# ---------------------------------------------------------------------------
# check
# ---------------------------------------------------------------------------


def _verdict_json(verdict: JordanVerdict) -> dict:
    ev = verdict.evidence
    return {
        "category": verdict.category.value,
        "betti_s": [ev.betti_s.b0, ev.betti_s.b1],
        "complement_b0": ev.complement_b0,
        "curve_points": len(verdict.candidate.curve),
        "component_sizes": list(ev.component_sizes),
        "degree_violations": len(ev.degree_violations),
        "min_points_ok": ev.min_points_ok,
        "nesting": [[cid, container] for cid, container in verdict.nesting],
        "width": ev.preprocessed.width,
        "height": ev.preprocessed.height,
    }


def cmd_check(args: argparse.Namespace) -> int:
    mask = read_mask(args.mask)
    if args.resize is not None:
        mask = resize_nearest(mask, *args.resize)
    verdict = evaluate(
        mask,
        pad_margin=args.pad,
        run_despeckle=not args.no_preprocess,
        self_check=args.self_check,
    )
    print(json.dumps(_verdict_json(verdict)))
    return EXIT_OK


# ---------------------------------------------------------------------------
# segment
# ---------------------------------------------------------------------------


def cmd_segment(args: argparse.Namespace) -> int:
    image = read_image(args.image)
    if args.resize is not None:
        image = resize_nearest(image, *args.resize)
    config = SegmenterConfig(method=Method(args.method), polarity=Polarity(args.polarity))
    threshold = compute_threshold(image, config)
    mask = segment(image, config)
    write_image(mask, args.out)
    if threshold is not None:
        print(f"threshold {threshold:g}", file=sys.stderr)
    return EXIT_OK


# ---------------------------------------------------------------------------
# evaluate
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class CorpusEntry:
    class_name: str
    entry: str
    image_path: Path
    mask_path: Path | None


def scan_corpus(root: Path) -> list[CorpusEntry]:
    """Find corpus entries: image files with an optional same-stem .png mask."""
    entries = []
    for p in sorted(root.rglob("*")):
        if not (p.is_file() and p.suffix.lower() in _IMAGE_SUFFIXES):
            continue
        mask = p.with_suffix(".png")
        rel_parent = p.parent.relative_to(root).as_posix()
        entries.append(
            CorpusEntry(
                class_name="" if rel_parent == "." else rel_parent,
                entry=p.stem,
                image_path=p,
                mask_path=mask if mask.exists() else None,
            )
        )
    entries.sort(key=lambda e: (e.class_name, e.entry))
    return entries


def _parse_methods(text: str, parser_error) -> list[str]:
    valid = {m.value for m in Method}
    out: list[str] = []
    for name in text.split(","):
        name = name.strip()
        if not name:
            continue
        if name != "annotation" and name not in valid:
            parser_error(f"unknown method {name!r}")
        if name not in out:
            out.append(name)
    return out


def _worker_count() -> int:
    env = os.environ.get("JORDAN_MASK_THREADS", "")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            print(f"warning: ignoring malformed JORDAN_MASK_THREADS={env!r}", file=sys.stderr)
    return min(4, os.cpu_count() or 1)


def _entry_records(
    entry: CorpusEntry,
    methods: list[str],
    size: tuple[int, int],
    pad: int,
    do_despeckle: bool,
    polarity: Polarity,
    timings: bool,
) -> list[dict]:
    records: list[dict] = []
    truth: BinaryImage | None = None
    if entry.mask_path is not None:
        try:
            truth = resize_nearest(read_mask(entry.mask_path), *size)
        except Exception as exc:  # per-entry isolation: record and move on
            records.append(
                {
                    "class": entry.class_name,
                    "entry": entry.entry,
                    "method": "annotation",
                    "error": f"{type(exc).__name__}: {exc}",
                }
            )
    image: GrayImage | None = None

    run = (["annotation"] if truth is not None else []) + [m for m in methods if m != "annotation"]
    for method in run:
        started = time.perf_counter()
        try:
            if method == "annotation":
                assert truth is not None
                pred = truth
            else:
                if image is None:
                    image = resize_nearest(read_image(entry.image_path), *size)
                pred = segment(image, SegmenterConfig(method=Method(method), polarity=polarity))
            verdict = evaluate(pred, pad_margin=pad, run_despeckle=do_despeckle)
            report = compute_metrics(confusion(pred, truth)) if truth is not None else None
        except Exception as exc:  # per-entry isolation: record and move on
            records.append(
                {
                    "class": entry.class_name,
                    "entry": entry.entry,
                    "method": method,
                    "error": f"{type(exc).__name__}: {exc}",
                }
            )
            continue
        elapsed = (time.perf_counter() - started) * 1000.0 if timings else 0.0
        ev = verdict.evidence
        records.append(
            {
                "class": entry.class_name,
                "entry": entry.entry,
                "method": method,
                "metrics": None
                if report is None
                else {k: getattr(report, k) for k in _METRIC_KEYS},
                "betti_s": [ev.betti_s.b0, ev.betti_s.b1],
                "complement_b0": ev.complement_b0,
                "verdict": verdict.category.value,
                "curve_points": len(verdict.candidate.curve),
                "elapsed_ms": elapsed,
            }
        )
    return records


def _summarize(entry_count: int, records: list[dict]) -> dict:
    verdicts = {c.value: 0 for c in VerdictCategory}
    per_method: dict[str, dict] = {}
    errors = 0
    undefined = 0
    for rec in records:
        if "error" in rec:
            errors += 1
            continue
        verdicts[rec["verdict"]] += 1
        metrics = rec["metrics"]
        if metrics is None or any(metrics[k] is None for k in _METRIC_KEYS):
            undefined += 1
        slot = per_method.setdefault(
            rec["method"], {k: [] for k in _METRIC_KEYS} | {"records": 0}
        )
        slot["records"] += 1
        if metrics is not None:
            for k in _METRIC_KEYS:
                if metrics[k] is not None:
                    slot[k].append(metrics[k])
    methods_out = {}
    for name in sorted(per_method):
        slot = per_method[name]
        methods_out[name] = {
            k: (sum(slot[k]) / len(slot[k]) if slot[k] else None) for k in _METRIC_KEYS
        }
        methods_out[name]["records"] = slot["records"]
    return {
        "entries": entry_count,
        "records": len(records),
        "errors": errors,
        "undefined_metrics": undefined,
        "verdicts": verdicts,
        "methods": methods_out,
    }


def _csv_row(rec: dict) -> list:
    def fmt(v):
        return "" if v is None else v

    if "error" in rec:
        return [rec["class"], rec["entry"], rec["method"]] + [""] * 11 + [rec["error"]]
    metrics = rec["metrics"] or {k: None for k in _METRIC_KEYS}
    return [
        rec["class"],
        rec["entry"],
        rec["method"],
        *[fmt(metrics[k]) for k in _METRIC_KEYS],
        rec["betti_s"][0],
        rec["betti_s"][1],
        rec["complement_b0"],
        rec["verdict"],
        rec["curve_points"],
        rec["elapsed_ms"],
        "",
    ]


def cmd_evaluate(args: argparse.Namespace) -> int:
    root = Path(args.root)
    if not root.is_dir():
        raise DecodeError(f"corpus root {root} is not a directory")
    parser_error = _Parser(prog="jordanmask evaluate").error
    methods = _parse_methods(args.methods, parser_error)
    polarity = Polarity(args.polarity)
    entries = scan_corpus(root)

    def job(entry: CorpusEntry) -> list[dict]:
        return _entry_records(
            entry, methods, args.resize, args.pad,
            not args.no_preprocess, polarity, args.timings,
        )

    workers = _worker_count()
    if workers > 1 and len(entries) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            chunks = list(pool.map(job, entries))
    else:
        chunks = [job(e) for e in entries]
    records = [rec for chunk in chunks for rec in chunk]
    records.sort(key=lambda r: (r["class"], r["entry"], r["method"]))

    out_stem = Path(args.out)
    out_stem.parent.mkdir(parents=True, exist_ok=True)
    if args.format in ("jsonl", "both"):
        with open(out_stem.with_suffix(".jsonl"), "w", encoding="utf-8", newline="\n") as f:
            for rec in records:
                f.write(json.dumps(rec, separators=(",", ":"), allow_nan=False) + "\n")
    if args.format in ("csv", "both"):
        with open(out_stem.with_suffix(".csv"), "w", encoding="utf-8", newline="") as f:
            writer = csv.writer(f, lineterminator="\n")
            writer.writerow(_CSV_HEADER)
            for rec in records:
                writer.writerow(_csv_row(rec))

    summary = _summarize(len(entries), records)
    print(json.dumps(summary, allow_nan=False))
    if args.strict and summary["errors"]:
        print(f"error: {summary['errors']} entry record(s) failed", file=sys.stderr)
        return EXIT_IO
    return EXIT_OK


# ---------------------------------------------------------------------------
# overlay
# ---------------------------------------------------------------------------


def render_overlay(
    image: GrayImage, mask: BinaryImage, *, pad: int = 1, run_despeckle: bool = True
) -> np.ndarray:
    """RGB array: tinted complement regions, tinted mask, curve in pure red."""
    verdict = evaluate(mask, pad_margin=pad, run_despeckle=run_despeckle)
    curve = verdict.candidate.curve.mask
    comps = label_mask(~curve, Adjacency.EIGHT)
    base = np.pad(image.pixels, pad)
    canvas = np.stack([base] * 3, axis=-1).astype(np.float64)
    for cid in range(comps.count):
        sel = comps.array == cid
        color = np.array(_PALETTE[cid % len(_PALETTE)], dtype=np.float64)
        canvas[sel] = 0.65 * canvas[sel] + 0.35 * color
    mask_sel = verdict.evidence.preprocessed.bits.astype(bool) & ~curve
    canvas[mask_sel] = 0.6 * canvas[mask_sel] + 0.4 * np.array(_MASK_TINT, dtype=np.float64)
    out = np.floor(canvas + 0.5).astype(np.uint8)
    out[curve] = _CURVE_COLOR
    return out


def cmd_overlay(args: argparse.Namespace) -> int:
    image = read_image(args.image)
    mask = read_mask(args.mask)
    if args.resize is not None:
        image = resize_nearest(image, *args.resize)
        mask = resize_nearest(mask, *args.resize)
    if (image.width, image.height) != (mask.width, mask.height):
        raise DegenerateInputError(
            f"image is {image.width}x{image.height} but mask is {mask.width}x{mask.height}"
        )
    out_path = Path(args.out)
    if out_path.suffix.lower() != ".png":
        raise UnsupportedFormatError(f"overlay output must be .png, got {out_path.suffix!r}")
    rgb = render_overlay(image, mask, pad=args.pad, run_despeckle=not args.no_preprocess)
    buf = io.BytesIO()
    Image.fromarray(rgb, mode="RGB").save(buf, format="PNG")
    out_path.write_bytes(buf.getvalue())
    return EXIT_OK


# ---------------------------------------------------------------------------


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except DegenerateInputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DEGENERATE
    except (DecodeError, UnsupportedFormatError, JordanMaskError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
