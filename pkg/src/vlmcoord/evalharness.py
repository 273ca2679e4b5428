"""End-to-end runs: fan-out, coordination, metrics, exports, and reports."""

from __future__ import annotations

import json
import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Sequence

from .backends import Client, FallbackEmbedder, ResponseCache
from .backends.types import BackendHandle
from .core import InstanceRecord, TaskFamily, ExpertOutput, gold_answer_text, normalize_text
from .datasets import DatasetManifest, ingest
from .errors import HarnessError, TransportError, UsageError
from .mapping import ChoicePick, ensemble_average, is_degenerate, majority_vote, map_to_choice
from .promptkit import (
    NO_PERTURBATION,
    PerturbationSpec,
    PromptTemplate,
    apply_perturbation,
    build_prompt,
    make_exemplar,
    sample_exemplars,
    transform_question,
)
from .util import canonical_json, sha256_hex

MODES = ("single", "ensemble_avg", "ensemble_vote", "cola_zero", "export_tuning")

FALLBACK_EMBEDDER_URL = "builtin://fallback"

# The instruction-tuning recipe recorded in every tuning export header.
TUNING_RECIPE = {
    "optimizer": "adafactor",
    "learning_rate": 1e-4,
    "batch_size": 16,
    "epochs": 1,
    "objective": "next-token-teacher-forcing",
    "decoding": "greedy",
}


@dataclass(frozen=True, slots=True)
class Mode:
    kind: str
    k: int = 0
    expert: str | None = None

    def __post_init__(self) -> None:
        if self.kind not in MODES:
            raise UsageError(f"unknown mode {self.kind!r}")
        if self.k < 0:
            raise UsageError("k must be >= 0")
        if self.kind == "single" and not self.expert:
            raise UsageError("single mode needs an expert name")


@dataclass(frozen=True, slots=True)
class TemplateFlags:
    include_captions: bool = True
    include_answers: bool = True
    include_choices: bool | None = None  # None: on for families with a choice list


@dataclass(frozen=True)
class RunConfig:
    dataset: DatasetManifest
    panel: tuple[BackendHandle, ...]
    embedder: BackendHandle
    mode: Mode
    coordinator: BackendHandle | None = None
    perturb: PerturbationSpec = NO_PERTURBATION
    template: TemplateFlags = TemplateFlags()
    seed: int = 0
    eval_split: str = "val"
    fanout_width: int = 8
    max_new_tokens: int = 30
    cache_dir: str | None = None

    def to_json_dict(self) -> dict:
        def handle(h: BackendHandle | None):
            if h is None:
                return None
            return {
                "name": h.name,
                "base_url": h.base_url,
                "role": h.role,
                "timeout_ms": h.timeout_ms,
                "max_retries": h.max_retries,
            }

        return {
            "dataset": {
                "name": self.dataset.name,
                "family": self.dataset.family.value,
                "paths": dict(self.dataset.paths),
                "image_root": self.dataset.image_root,
            },
            "panel": [handle(h) for h in self.panel],
            "coordinator": handle(self.coordinator),
            "embedder": handle(self.embedder),
            "mode": {"kind": self.mode.kind, "k": self.mode.k, "expert": self.mode.expert},
            "perturb": {
                "mode": self.perturb.mode,
                "probability": self.perturb.probability,
                "seed": self.perturb.seed,
                "expert": self.perturb.expert,
                "phases": list(self.perturb.phases),
            },
            "template": {
                "include_captions": self.template.include_captions,
                "include_answers": self.template.include_answers,
                "include_choices": self.template.include_choices,
            },
            "seed": self.seed,
            "eval_split": self.eval_split,
            "fanout_width": self.fanout_width,
            "max_new_tokens": self.max_new_tokens,
            "cache_dir": self.cache_dir,
        }

    @classmethod
    def from_json_dict(cls, raw: dict) -> "RunConfig":
        def handle(h: dict | None) -> BackendHandle | None:
            if h is None:
                return None
            return BackendHandle(
                name=h["name"],
                base_url=h["base_url"],
                role=h["role"],
                timeout_ms=h.get("timeout_ms", 10_000),
                max_retries=h.get("max_retries", 1),
            )

        dataset = raw["dataset"]
        mode = raw.get("mode") or {}
        perturb = raw.get("perturb") or {}
        template = raw.get("template") or {}
        return cls(
            dataset=DatasetManifest(
                name=dataset["name"],
                family=TaskFamily(dataset["family"]),
                paths=dict(dataset["paths"]),
                image_root=dataset.get("image_root"),
            ),
            panel=tuple(handle(h) for h in raw["panel"]),
            coordinator=handle(raw.get("coordinator")),
            embedder=handle(raw["embedder"]),
            mode=Mode(
                kind=mode.get("kind", "ensemble_avg"),
                k=mode.get("k", 0) or 0,
                expert=mode.get("expert"),
            ),
            perturb=PerturbationSpec(
                mode=perturb.get("mode", "none"),
                probability=perturb.get("probability", 0.0),
                seed=perturb.get("seed", 0),
                expert=perturb.get("expert"),
                phases=tuple(perturb.get("phases", ["tune", "eval"])),
            ),
            template=TemplateFlags(
                include_captions=template.get("include_captions", True),
                include_answers=template.get("include_answers", True),
                include_choices=template.get("include_choices"),
            ),
            seed=raw.get("seed", 0),
            eval_split=raw.get("eval_split", "val"),
            fanout_width=raw.get("fanout_width", 8),
            max_new_tokens=raw.get("max_new_tokens", 30),
            cache_dir=raw.get("cache_dir"),
        )

    @property
    def fingerprint(self) -> str:
        return sha256_hex(canonical_json(self.to_json_dict()))


@dataclass
class RunReport:
    """Everything a Table-2-style row is computed from.

    Wall-clock timing is carried for diagnostics but excluded from equality
    and from the canonical serialization: reports from identical mock-backed
    runs must be byte-identical.
    """

    config_fingerprint: str
    summary: dict
    per_instance: list[dict]
    metrics: dict
    timing: dict = field(default_factory=dict, compare=False)

    def to_json(self) -> str:
        payload = {
            "config_fingerprint": self.config_fingerprint,
            "summary": self.summary,
            "per_instance": self.per_instance,
            "metrics": self.metrics,
        }
        return json.dumps(payload, ensure_ascii=False, sort_keys=True, indent=2) + "\n"

    @classmethod
    def from_json(cls, text: str) -> "RunReport":
        raw = json.loads(text)
        return cls(
            config_fingerprint=raw["config_fingerprint"],
            summary=raw["summary"],
            per_instance=raw["per_instance"],
            metrics=raw["metrics"],
        )


def mc_accuracy(rows: Sequence[dict]) -> float:
    """Fraction of rows whose pick index hits the gold choice."""
    if not rows:
        raise UsageError("mc_accuracy over zero rows")
    correct = 0
    for row in rows:
        gold = (row.get("gold") or {}).get("choice")
        pick = row.get("pick")
        if gold is None or pick is None:
            raise UsageError(f"row {row.get('id')!r} lacks a gold choice or a pick")
        correct += int(pick["index"] == gold)
    return correct / len(rows)


_ARTICLES = ("a ", "an ", "the ")


def _strip_article(s: str) -> str:
    for article in _ARTICLES:
        if s.startswith(article):
            return s[len(article):]
    return s


def da_accuracy(completion: str, gold_direct_answers: Sequence[str]) -> float:
    """Soft direct-answer score: min(matching gold votes / 3, 1).

    Both sides are normalized and stripped of one leading article before
    comparison.
    """
    if not gold_direct_answers:
        raise UsageError("da_accuracy needs a non-empty gold list")
    target = _strip_article(normalize_text(completion))
    matches = sum(1 for gold in gold_direct_answers if _strip_article(normalize_text(gold)) == target)
    return min(matches / 3.0, 1.0)


def _build_embedder(cfg: RunConfig, cache: ResponseCache | None):
    if cfg.embedder.base_url == FALLBACK_EMBEDDER_URL:
        return FallbackEmbedder()
    return Client(cfg.embedder, cache)


def _mc_like(family: TaskFamily) -> bool:
    return family is not TaskFamily.VQA_DA


def _include_choices(cfg: RunConfig) -> bool:
    if cfg.template.include_choices is None:
        return _mc_like(cfg.dataset.family)
    return cfg.template.include_choices


def _validate_config(cfg: RunConfig) -> None:
    if not cfg.panel:
        raise UsageError("panel must list at least one expert")
    names = [h.name for h in cfg.panel]
    if len(set(names)) != len(names):
        raise UsageError("panel expert names must be unique")
    for h in cfg.panel:
        if h.role != "expert":
            raise UsageError(f"panel backend {h.name!r} must have role 'expert'")
    if cfg.embedder.role != "embedder":
        raise UsageError("embedder handle must have role 'embedder'")
    if cfg.mode.kind == "cola_zero" and cfg.coordinator is None:
        raise UsageError("mode cola_zero requires a coordinator backend")
    if cfg.coordinator is not None and cfg.coordinator.role != "coordinator":
        raise UsageError("coordinator handle must have role 'coordinator'")
    if cfg.mode.kind == "single" and cfg.mode.expert not in names:
        raise UsageError(f"single mode expert {cfg.mode.expert!r} not in panel {names}")
    if cfg.perturb.mode == "single_expert" and cfg.perturb.expert not in names:
        raise UsageError(f"single_expert perturbation {cfg.perturb.expert!r} not in panel {names}")
    if cfg.perturb.mode in ("swap_caption_labels", "swap_answer_labels") and len(names) != 2:
        raise UsageError("label swaps need a panel of exactly 2 experts")
    if cfg.mode.kind in ("ensemble_avg", "ensemble_vote") and not _mc_like(cfg.dataset.family):
        raise UsageError("ensemble modes need a family with a choice list")
    if cfg.fanout_width < 1:
        raise UsageError("fanout_width must be >= 1")
    if cfg.mode.kind == "export_tuning" and "train" not in cfg.dataset.paths:
        raise UsageError("export_tuning requires a train split in the manifest")


def _health_check(clients: list[Client]) -> None:
    for client in clients:
        data = client.health()
        roles = data.get("roles", [])
        if not data.get("ok") or client.handle.role not in roles:
            raise TransportError(
                f"{client.handle.name}: health check failed (ok={data.get('ok')}, roles={roles})"
            )


class _Fetcher:
    """Phase-A fan-out of caption/answer calls, joined in panel order."""

    def __init__(self, cfg: RunConfig, clients: dict[str, Client], pool: ThreadPoolExecutor):
        self.cfg = cfg
        self.clients = clients
        self.pool = pool
        self.results: dict[tuple[str, str, str], object] = {}

    def submit(self, records: Sequence[InstanceRecord], experts: Sequence[str],
               want_captions: bool, want_answers: bool) -> None:
        futures = {}
        for record in records:
            query = transform_question(record.family, record.question)
            for name in experts:
                client = self.clients[name]
                if want_captions and (record.id, name, "caption") not in self.results:
                    futures[(record.id, name, "caption")] = self.pool.submit(client.caption, record.image)
                if want_answers and (record.id, name, "answer") not in self.results:
                    futures[(record.id, name, "answer")] = self.pool.submit(
                        client.plausible_answer, record.image, query
                    )
        for key, future in futures.items():
            try:
                self.results[key] = future.result()
            except HarnessError as exc:
                self.results[key] = exc

    def outputs_for(self, record_id: str, experts: Sequence[str]) -> list[ExpertOutput]:
        """Panel-ordered outputs; raises the first stored error for the instance."""
        outputs = []
        for name in experts:
            caption = self.results.get((record_id, name, "caption"), "")
            answer = self.results.get((record_id, name, "answer"), "")
            for value in (caption, answer):
                if isinstance(value, Exception):
                    raise value
            outputs.append(ExpertOutput(expert_name=name, caption=caption, plausible_answer=answer))
        return outputs


def run_pipeline(cfg: RunConfig) -> RunReport:
    """Execute one evaluation run; per-instance failures are recorded, never fatal."""
    _validate_config(cfg)
    if cfg.mode.kind == "export_tuning":
        raise UsageError("use export_tuning_set for export runs")
    t_start = time.monotonic()
    splits = ingest(cfg.dataset)
    if cfg.eval_split not in splits:
        raise UsageError(f"manifest has no {cfg.eval_split!r} split")
    records = splits[cfg.eval_split]
    train = splits.get("train", [])

    cache = ResponseCache(Path(cfg.cache_dir)) if cfg.cache_dir else ResponseCache()
    clients = {h.name: Client(h, cache) for h in cfg.panel}
    coordinator = Client(cfg.coordinator, cache) if cfg.coordinator is not None else None
    embedder = _build_embedder(cfg, cache)
    remote = list(clients.values())
    if coordinator is not None:
        remote.append(coordinator)
    if isinstance(embedder, Client):
        remote.append(embedder)
    _health_check(remote)

    panel_names = [h.name for h in cfg.panel]
    include_choices = _include_choices(cfg)
    prompt_mode = cfg.mode.kind == "cola_zero"
    want_captions = prompt_mode and cfg.template.include_captions
    want_answers = True if not prompt_mode else cfg.template.include_answers
    fetch_experts = [cfg.mode.expert] if cfg.mode.kind == "single" else panel_names

    exemplar_plan: dict[str, list[InstanceRecord]] = {}
    if prompt_mode and cfg.mode.k > 0:
        for record in records:
            exemplar_plan[record.id] = sample_exemplars(train, cfg.mode.k, cfg.seed, record.id)

    t_fanout = time.monotonic()
    with ThreadPoolExecutor(max_workers=cfg.fanout_width) as pool:
        fetcher = _Fetcher(cfg, clients, pool)
        fetcher.submit(records, fetch_experts, want_captions, want_answers)
        if exemplar_plan:
            unique: dict[str, InstanceRecord] = {}
            for sampled in exemplar_plan.values():
                for record in sampled:
                    unique[record.id] = record
            fetcher.submit(list(unique.values()), fetch_experts, want_captions, want_answers)
        t_coord = time.monotonic()

        def process(record: InstanceRecord) -> dict:
            return _process_instance(cfg, record, fetcher, fetch_experts, coordinator,
                                     embedder, include_choices, exemplar_plan,
                                     want_captions, want_answers)

        rows = list(pool.map(process, records))
    t_done = time.monotonic()

    metrics = _reduce_metrics(rows, len(records))
    report = RunReport(
        config_fingerprint=cfg.fingerprint,
        summary={
            "mode": cfg.mode.kind if cfg.mode.expert is None else f"{cfg.mode.kind}({cfg.mode.expert})",
            "panel": "+".join(panel_names),
            "k": cfg.mode.k,
            "dataset": cfg.dataset.name,
            "split": cfg.eval_split,
            "perturbation": cfg.perturb.mode,
        },
        per_instance=rows,
        metrics=metrics,
        timing={
            "total_s": t_done - t_start,
            "fanout_s": t_coord - t_fanout,
            "coordination_s": t_done - t_coord,
        },
    )
    return report


def _process_instance(
    cfg: RunConfig,
    record: InstanceRecord,
    fetcher: _Fetcher,
    fetch_experts: Sequence[str],
    coordinator: Client | None,
    embedder,
    include_choices: bool,
    exemplar_plan: dict[str, list[InstanceRecord]],
    want_captions: bool,
    want_answers: bool,
) -> dict:
    gold: dict = {"choice": record.gold_choice}
    if record.gold_choice is not None:
        gold["text"] = record.choices[record.gold_choice]
    elif record.gold_direct_answers:
        gold["direct_answers"] = list(record.gold_direct_answers)
    row: dict = {
        "id": record.id,
        "prompt_fingerprint": None,
        "expert_outputs": None,
        "completion": None,
        "pick": None,
        "gold": gold,
        "correct": None,
        "da_score": None,
        "degenerate": False,
        "errors": [],
    }
    try:
        outputs = fetcher.outputs_for(record.id, fetch_experts)
        perturbed = apply_perturbation(outputs, cfg.perturb, "eval", record.id)
        row["expert_outputs"] = [
            {"expert_name": o.expert_name, "caption": o.caption, "plausible_answer": o.plausible_answer}
            for o in perturbed
        ]
        # Degeneracy means the backend returned empty text; deliberate blanks
        # from drop perturbations are not degenerate, so check raw outputs.
        row["degenerate"] = any(
            (want_answers and normalize_text(o.plausible_answer) == "")
            or (want_captions and normalize_text(o.caption) == "")
            for o in outputs
        )
        answer_text: str | None = None
        pick: ChoicePick | None = None

        if cfg.mode.kind == "single":
            chosen = next(o for o in perturbed if o.expert_name == cfg.mode.expert)
            answer_text = chosen.plausible_answer
            if _mc_like(record.family):
                _, pick = map_to_choice(answer_text, record.choices, embedder)
        elif cfg.mode.kind in ("ensemble_avg", "ensemble_vote"):
            mapped = [map_to_choice(o.plausible_answer, record.choices, embedder) for o in perturbed]
            if cfg.mode.kind == "ensemble_avg":
                averaged = ensemble_average([dist for dist, _ in mapped])
                index = max(range(len(averaged.scores)), key=lambda i: (averaged.scores[i], -i))
                pick = ChoicePick(index, averaged.choice_texts[index], averaged.scores[index])
            else:
                pick = majority_vote([p for _, p in mapped])
        else:  # cola_zero
            tpl = PromptTemplate(
                family=record.family,
                expert_names=tuple(o.expert_name for o in perturbed),
                include_captions=cfg.template.include_captions,
                include_answers=cfg.template.include_answers,
                include_choices=include_choices,
            )
            exemplars = [
                make_exemplar(ex, fetcher.outputs_for(ex.id, fetch_experts))
                for ex in exemplar_plan.get(record.id, [])
            ]
            query = transform_question(record.family, record.question)
            prompt = build_prompt(tpl, perturbed, query, record.choices, exemplars, cfg.perturb)
            row["prompt_fingerprint"] = prompt.fingerprint
            completion = coordinator.complete(prompt, cfg.max_new_tokens)
            row["completion"] = completion.value
            answer_text = completion.value
            if _mc_like(record.family):
                _, pick = map_to_choice(completion, record.choices, embedder)

        if _mc_like(record.family):
            if record.gold_choice is None:
                raise UsageError(f"{record.id}: no gold choice to score against")
            row["pick"] = {"index": pick.index, "text": pick.text, "score": pick.score}
            row["correct"] = pick.index == record.gold_choice
            row["degenerate"] = row["degenerate"] or is_degenerate(pick)
        else:
            row["da_score"] = da_accuracy(answer_text, record.gold_direct_answers)
            row["degenerate"] = row["degenerate"] or normalize_text(answer_text) == ""
    except HarnessError as exc:
        row["errors"].append(f"{type(exc).__name__}: {exc}")
    return row


def _reduce_metrics(rows: Sequence[dict], dataset_size: int) -> dict:
    evaluated = [r for r in rows if not r["errors"]]
    metrics: dict = {
        "n_evaluated": len(evaluated),
        "n_skipped": dataset_size - len(evaluated),
        "n_degenerate": sum(1 for r in evaluated if r["degenerate"]),
    }
    mc_rows = [r for r in evaluated if r["correct"] is not None]
    da_rows = [r for r in evaluated if r["da_score"] is not None]
    if mc_rows:
        metrics["mc_accuracy"] = mc_accuracy(mc_rows)
    if da_rows:
        metrics["da_accuracy"] = math.fsum(r["da_score"] for r in da_rows) / len(da_rows)
    return metrics


def export_tuning_set(cfg: RunConfig, out_path: Path | str) -> Path:
    """Write {input, target} pairs for the train split as canonical JSONL.

    The first line is a `#meta` header carrying the tuning recipe for an
    external trainer. Tune-phase perturbation applies; identical configs
    re-export byte-identically.
    """
    _validate_config(cfg)
    if cfg.mode.kind != "export_tuning":
        raise UsageError("config mode must be export_tuning")
    splits = ingest(cfg.dataset)
    records = splits["train"]

    cache = ResponseCache(Path(cfg.cache_dir)) if cfg.cache_dir else ResponseCache()
    clients = {h.name: Client(h, cache) for h in cfg.panel}
    _health_check(list(clients.values()))

    panel_names = [h.name for h in cfg.panel]
    include_choices = _include_choices(cfg)
    with ThreadPoolExecutor(max_workers=cfg.fanout_width) as pool:
        fetcher = _Fetcher(cfg, clients, pool)
        fetcher.submit(records, panel_names, cfg.template.include_captions, cfg.template.include_answers)

    pairs = []
    skips = []
    for record in records:
        try:
            outputs = fetcher.outputs_for(record.id, panel_names)
            perturbed = apply_perturbation(outputs, cfg.perturb, "tune", record.id)
            tpl = PromptTemplate(
                family=record.family,
                expert_names=tuple(o.expert_name for o in perturbed),
                include_captions=cfg.template.include_captions,
                include_answers=cfg.template.include_answers,
                include_choices=include_choices,
            )
            query = transform_question(record.family, record.question)
            prompt = build_prompt(tpl, perturbed, query, record.choices)
            pairs.append({"id": record.id, "input": prompt.value, "target": gold_answer_text(record)})
        except HarnessError as exc:
            skips.append({"id": record.id, "error": f"{type(exc).__name__}: {exc}"})

    meta = {
        "kind": "tuning-pairs",
        **TUNING_RECIPE,
        "dataset": cfg.dataset.name,
        "config_fingerprint": cfg.fingerprint,
        "count": len(pairs),
        "skipped": skips,
    }
    out_path = Path(out_path)
    out_path.parent.mkdir(parents=True, exist_ok=True)
    lines = ["#meta " + json.dumps(meta, ensure_ascii=False, sort_keys=True)]
    lines += [json.dumps(pair, ensure_ascii=False, sort_keys=True) for pair in pairs]
    out_path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return out_path


def emit_report(report: RunReport, fmt: str, out_path: Path | str) -> Path:
    """Write the report as lossless JSON or a Table-2-style markdown row."""
    out_path = Path(out_path)
    out_path.parent.mkdir(parents=True, exist_ok=True)
    if fmt == "json":
        out_path.write_text(report.to_json(), encoding="utf-8")
    elif fmt == "markdown_table" or fmt == "markdown":
        out_path.write_text(render_markdown([report]), encoding="utf-8")
    else:
        raise UsageError(f"unknown report format {fmt!r}")
    return out_path


def load_report(path: Path | str) -> RunReport:
    return RunReport.from_json(Path(path).read_text(encoding="utf-8"))


def _accuracy_cell(metrics: dict) -> str:
    for key in ("mc_accuracy", "da_accuracy"):
        if key in metrics:
            return f"{metrics[key] * 100:.1f}"
    return "-"


def render_markdown(reports: Sequence[RunReport], labels: Sequence[str] | None = None) -> str:
    """One accuracy row per report, percentages with one decimal."""
    lines = [
        "| run | mode | panel | k | perturbation | accuracy | evaluated | degenerate |",
        "| --- | --- | --- | --- | --- | --- | --- | --- |",
    ]
    footnotes = []
    for i, report in enumerate(reports):
        label = labels[i] if labels else report.summary.get("dataset", f"run{i}")
        s = report.summary
        m = report.metrics
        lines.append(
            f"| {label} | {s['mode']} | {s['panel']} | {s['k']} | {s.get('perturbation', 'none')} | "
            f"{_accuracy_cell(m)} | {m['n_evaluated']} | {m['n_degenerate']} |"
        )
        if m["n_degenerate"]:
            footnotes.append(
                f"[^] {label}: {m['n_degenerate']} degenerate rows kept in the denominator."
            )
    return "\n".join(lines + footnotes) + "\n"


def expand_ablation(cfg: RunConfig) -> list[tuple[str, RunConfig]]:
    """The seven label/section perturbation configurations plus the baseline.

    All rows run through the coordinator so each has prompt fingerprints;
    the single-VLM rows (#1, #2) filter the panel with a single_expert
    perturbation rather than bypassing the prompt.
    """
    if cfg.coordinator is None:
        raise UsageError("ablate needs a coordinator backend")
    if len(cfg.panel) != 2:
        raise UsageError("the ablation matrix is defined over a 2-expert panel")
    base_mode = Mode(kind="cola_zero", k=cfg.mode.k if cfg.mode.kind == "cola_zero" else 0)
    base = replace(
        cfg,
        mode=base_mode,
        perturb=NO_PERTURBATION,
        template=replace(cfg.template, include_captions=True, include_answers=True),
    )
    first, second = (h.name for h in cfg.panel)
    seed = cfg.perturb.seed or cfg.seed

    def perturbed(**kwargs) -> RunConfig:
        return replace(base, perturb=PerturbationSpec(seed=seed, **kwargs))

    return [
        ("baseline", base),
        ("1-single-first", perturbed(mode="single_expert", expert=first)),
        ("2-single-second", perturbed(mode="single_expert", expert=second)),
        ("3-answers-only", replace(base, template=replace(base.template, include_captions=False))),
        ("4-captions-only", replace(base, template=replace(base.template, include_answers=False))),
        ("5-swap-caption-labels", perturbed(mode="swap_caption_labels", probability=0.5)),
        ("6-swap-answer-labels", perturbed(mode="swap_answer_labels", probability=0.5)),
        ("7-swap-answers-eval-only", perturbed(mode="swap_answer_labels", probability=1.0, phases=("eval",))),
    ]
