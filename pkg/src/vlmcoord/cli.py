"""Command-line surface: run, ablate, export-tuning, serve-mock, validate-data, report.

Exit codes: 0 ok, 2 usage/config, 3 transport-fatal, 4 data validation.
Configuration comes from one JSON document plus dotted-path --set overrides;
the only environment knobs are VLMC_CACHE_DIR and VLMC_LOG.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from pathlib import Path

from .datasets import DatasetManifest, ingest, validate
from .core import TaskFamily
from .errors import ParseError, ProtocolError, TransportError, UsageError, ValidationError
from .evalharness import (
    RunConfig,
    emit_report,
    expand_ablation,
    export_tuning_set,
    load_report,
    render_markdown,
    run_pipeline,
)

log = logging.getLogger("vlmcoord")


def _parse_value(text: str):
    try:
        return json.loads(text)
    except ValueError:
        return text


def _parse_mode_shorthand(text: str) -> dict:
    """Accept `cola_zero`, `cola_zero.k=2`, or `single.expert=OFA`."""
    mode: dict = {"kind": text, "k": 0, "expert": None}
    if "." in text:
        kind, _, rest = text.partition(".")
        key, _, value = rest.partition("=")
        if not key or not value:
            raise UsageError(f"cannot parse mode override {text!r}")
        mode = {"kind": kind, "k": 0, "expert": None, key: _parse_value(value)}
    return mode


def _apply_override(config: dict, assignment: str) -> None:
    key, sep, value = assignment.partition("=")
    if not sep:
        raise UsageError(f"--set needs KEY=VALUE, got {assignment!r}")
    if key == "mode":
        config["mode"] = _parse_mode_shorthand(str(value))
        return
    node = config
    parts = key.split(".")
    for part in parts[:-1]:
        if not isinstance(node, dict) or part not in node:
            raise UsageError(f"--set references unknown config key {key!r}")
        node = node[part]
    if not isinstance(node, dict) or parts[-1] not in node:
        raise UsageError(f"--set references unknown config key {key!r}")
    node[parts[-1]] = _parse_value(value)


def _load_config(path: str, overrides: list[str], out_dir: Path) -> RunConfig:
    try:
        raw = json.loads(Path(path).read_text(encoding="utf-8"))
    except OSError as exc:
        raise UsageError(f"cannot read config {path}: {exc}") from exc
    except ValueError as exc:
        raise UsageError(f"config {path} is not valid JSON: {exc}") from exc
    try:
        normalized = RunConfig.from_json_dict(raw).to_json_dict()
    except KeyError as exc:
        raise UsageError(f"config {path} is missing required field {exc}") from exc
    for assignment in overrides:
        _apply_override(normalized, assignment)
    cfg = RunConfig.from_json_dict(normalized)
    if cfg.cache_dir is None:
        cache_root = os.environ.get("VLMC_CACHE_DIR") or str(out_dir / "cache")
        cfg = RunConfig.from_json_dict({**cfg.to_json_dict(), "cache_dir": cache_root})
    return cfg


def _write_run(report, out_dir: Path) -> Path:
    run_dir = out_dir / report.config_fingerprint
    emit_report(report, "json", run_dir / "report.json")
    emit_report(report, "markdown_table", run_dir / "report.md")
    (run_dir / "timing.json").write_text(
        json.dumps(report.timing, indent=2) + "\n", encoding="utf-8"
    )
    return run_dir


def _cmd_run(args) -> int:
    out_dir = Path(args.out)
    cfg = _load_config(args.config, args.set, out_dir)
    report = run_pipeline(cfg)
    run_dir = _write_run(report, out_dir)
    if args.format == "json":
        print(report.to_json(), end="")
    else:
        print(render_markdown([report]), end="")
    log.info("report written to %s", run_dir)
    return 0


def _cmd_ablate(args) -> int:
    out_dir = Path(args.out)
    cfg = _load_config(args.config, args.set, out_dir)
    labels, reports = [], []
    for label, variant in expand_ablation(cfg):
        log.info("ablation %s", label)
        report = run_pipeline(variant)
        _write_run(report, out_dir)
        labels.append(label)
        reports.append(report)
    table = render_markdown(reports, labels)
    (out_dir / "ablation.md").write_text(table, encoding="utf-8")
    print(table, end="")
    return 0


def _cmd_export_tuning(args) -> int:
    out_dir = Path(args.out)
    cfg = _load_config(args.config, args.set, out_dir)
    if cfg.mode.kind != "export_tuning":
        cfg = RunConfig.from_json_dict(
            {**cfg.to_json_dict(), "mode": {"kind": "export_tuning", "k": 0, "expert": None}}
        )
    path = export_tuning_set(cfg, out_dir / cfg.fingerprint / "tuning.jsonl")
    print(path)
    return 0


def _cmd_serve_mock(args) -> int:
    from .backends.mock import MockServer

    server = MockServer(args.fixture_dir, args.port)
    print(f"mock serving {sorted(server.personas)} at {server.base_url}", flush=True)
    try:
        server.httpd.serve_forever()
    except KeyboardInterrupt:
        pass
    finally:
        server.httpd.server_close()
    return 0


def _cmd_validate_data(args) -> int:
    try:
        raw = json.loads(Path(args.config).read_text(encoding="utf-8"))
    except OSError as exc:
        raise UsageError(f"cannot read config {args.config}: {exc}") from exc
    except ValueError as exc:
        raise UsageError(f"config {args.config} is not valid JSON: {exc}") from exc
    dataset = raw["dataset"] if "dataset" in raw else raw
    manifest = DatasetManifest(
        name=dataset["name"],
        family=TaskFamily(dataset["family"]),
        paths=dict(dataset["paths"]),
        image_root=dataset.get("image_root"),
    )
    splits = ingest(manifest)
    total = 0
    for split, records in sorted(splits.items()):
        violations = validate(records)
        if violations:
            for violation in violations:
                print(f"{split}: {violation}")
            return 4
        print(f"{split}: {len(records)} records ok")
        total += len(records)
    print(f"total: {total} records, no violations")
    return 0


def _cmd_report(args) -> int:
    try:
        report = load_report(args.report)
    except OSError as exc:
        raise UsageError(f"cannot read report {args.report}: {exc}") from exc
    except (ValueError, KeyError) as exc:
        raise UsageError(f"{args.report} is not a valid report: {exc}") from exc
    if args.format == "json":
        print(report.to_json(), end="")
    else:
        print(render_markdown([report]), end="")
    return 0


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="vlmcoord", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("-c", "--config", required=True, help="run config JSON")
        p.add_argument("--set", action="append", default=[], metavar="KEY=VALUE",
                       help="override a config key (dotted path); repeatable")
        p.add_argument("--out", default="runs", help="output directory root")
        p.add_argument("--format", choices=("json", "markdown"), default="markdown")

    common(sub.add_parser("run", help="execute one evaluation run"))
    common(sub.add_parser("ablate", help="run the eight-row ablation matrix"))
    common(sub.add_parser("export-tuning", help="emit instruction-tuning pairs"))

    serve = sub.add_parser("serve-mock", help="serve fixture-backed mock backends")
    serve.add_argument("fixture_dir")
    serve.add_argument("--port", type=int, default=8080)

    vdata = sub.add_parser("validate-data", help="check dataset invariants")
    vdata.add_argument("-c", "--config", required=True)

    rep = sub.add_parser("report", help="re-render a stored report")
    rep.add_argument("report")
    rep.add_argument("--format", choices=("json", "markdown"), default="markdown")
    return parser


_COMMANDS = {
    "run": _cmd_run,
    "ablate": _cmd_ablate,
    "export-tuning": _cmd_export_tuning,
    "serve-mock": _cmd_serve_mock,
    "validate-data": _cmd_validate_data,
    "report": _cmd_report,
}


def main(argv: list[str] | None = None) -> int:
    logging.basicConfig(level=os.environ.get("VLMC_LOG", "WARNING").upper())
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 2
    except (TransportError, ProtocolError) as exc:
        print(f"transport error: {exc}", file=sys.stderr)
        return 3
    except (ParseError, ValidationError) as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return 4


def entrypoint() -> None:
    sys.exit(main())
