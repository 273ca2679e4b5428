"""One-epoch instruction tuning on exported {input, target} pairs.

The export file's #meta header carries the recipe (Adafactor, lr 1e-4,
batch 16, one epoch, teacher forcing); file values win over the defaults.
Inputs feed the encoder, targets become decoder labels, and the summed
next-token loss is optimized in file order with no shuffling, so a rerun
reproduces the same trajectory.
"""

from __future__ import annotations

import json
from pathlib import Path

import torch

from .models import MAX_INPUT_TOKENS, TextGenModel
from .tokenizer import ByteTokenizer

MAX_TARGET_TOKENS = 64


def read_tuning_file(path: str | Path) -> tuple[dict, list[dict]]:
    """Parse a tuning export; malformed lines abort with their line number."""
    lines = Path(path).read_text(encoding="utf-8").splitlines()
    if not lines:
        raise ValueError(f"{path}: empty tuning file")
    meta: dict = {}
    pairs = []
    start = 0
    if lines[0].startswith("#meta "):
        try:
            meta = json.loads(lines[0][len("#meta "):])
        except ValueError as exc:
            raise ValueError(f"{path}: line 1: bad #meta header: {exc}") from exc
        start = 1
    for lineno, line in enumerate(lines[start:], start=start + 1):
        if not line.strip():
            continue
        try:
            pair = json.loads(line)
        except ValueError as exc:
            raise ValueError(f"{path}: line {lineno}: {exc}") from exc
        if "input" not in pair or "target" not in pair:
            raise ValueError(f"{path}: line {lineno}: pair needs 'input' and 'target'")
        pairs.append(pair)
    if not pairs:
        raise ValueError(f"{path}: no pairs found")
    return meta, pairs


def _batch_tensors(pairs: list[dict], tokenizer: ByteTokenizer, device: str):
    inputs = [tokenizer.encode(p["input"], max_length=MAX_INPUT_TOKENS) for p in pairs]
    targets = [tokenizer.encode(p["target"], add_eos=True, max_length=MAX_TARGET_TOKENS) for p in pairs]
    in_width = max(len(i) for i in inputs)
    out_width = max(len(t) for t in targets)
    input_ids = torch.full((len(pairs), in_width), tokenizer.pad_id, dtype=torch.long)
    attention = torch.zeros((len(pairs), in_width), dtype=torch.long)
    labels = torch.full((len(pairs), out_width), -100, dtype=torch.long)
    for row, (ids, tgt) in enumerate(zip(inputs, targets)):
        input_ids[row, : len(ids)] = torch.tensor(ids)
        attention[row, : len(ids)] = 1
        labels[row, : len(tgt)] = torch.tensor(tgt)
    return input_ids.to(device), attention.to(device), labels.to(device)


@torch.no_grad()
def _dataset_loss(model, batches) -> float:
    model.eval()
    total, count = 0.0, 0
    for input_ids, attention, labels in batches:
        out = model(input_ids=input_ids, attention_mask=attention, labels=labels)
        total += float(out.loss)
        count += 1
    return total / count


def finetune(tuning_jsonl: str | Path, model_id: str, out_dir: str | Path,
             device: str = "cpu") -> dict:
    """Train for one epoch and save a directory loadable by the server.

    Returns per-batch losses plus whole-set loss before and after the epoch.
    """
    from transformers.optimization import Adafactor

    meta, pairs = read_tuning_file(tuning_jsonl)
    lr = float(meta.get("learning_rate", 1e-4))
    batch_size = int(meta.get("batch_size", 16))
    epochs = int(meta.get("epochs", 1))

    torch.manual_seed(0)
    gen = TextGenModel.load(model_id, device)
    model = gen.model
    tokenizer = gen.tokenizer
    batches = [
        _batch_tensors(pairs[i : i + batch_size], tokenizer, device)
        for i in range(0, len(pairs), batch_size)
    ]
    optimizer = Adafactor(
        model.parameters(), lr=lr, scale_parameter=False, relative_step=False, warmup_init=False
    )

    loss_before = _dataset_loss(model, batches)
    step_losses = []
    model.train()
    for _ in range(epochs):
        for input_ids, attention, labels in batches:
            optimizer.zero_grad()
            out = model(input_ids=input_ids, attention_mask=attention, labels=labels)
            out.loss.backward()
            optimizer.step()
            step_losses.append(float(out.loss.detach()))
    loss_after = _dataset_loss(model, batches)

    out_dir = Path(out_dir)
    gen.save(out_dir)
    summary = {
        "pairs": len(pairs),
        "epochs": epochs,
        "learning_rate": lr,
        "batch_size": batch_size,
        "loss_before": loss_before,
        "loss_after": loss_after,
        "step_losses": step_losses,
    }
    (out_dir / "training_summary.json").write_text(
        json.dumps(summary, indent=2) + "\n", encoding="utf-8"
    )
    return summary
