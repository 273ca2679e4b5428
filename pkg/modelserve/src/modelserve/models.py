"""Model bindings: built-in tiny architectures, finetuned dirs, and hub ids.

Model ids resolve in three ways:
  tiny-seq2seq[:seed] / tiny-vision[:seed] / tiny-encoder[:seed]
      Seeded random-weight architectures (T5, ViT+GPT2) with the byte
      tokenizer. Real forward passes, no downloads; meant for offline smoke
      runs and CI-less environments.
  a filesystem path
      A directory produced by finetune(); carries a modelserve.json marker.
  anything else
      A Hugging Face model id loaded through transformers pipelines (needs
      hub access and real weights; the paper-scale bindings in
      configs/serve.live.json use this path).
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np
import torch
from PIL import Image

from .tokenizer import ByteTokenizer

MAX_INPUT_TOKENS = 768
MARKER = "modelserve.json"


def _parse_tiny(model_id: str, prefix: str) -> int | None:
    if model_id == prefix:
        return 0
    if model_id.startswith(prefix + ":"):
        return int(model_id.split(":", 1)[1])
    return None


def _tiny_t5(seed: int):
    from transformers import T5Config, T5ForConditionalGeneration

    torch.manual_seed(seed)
    config = T5Config(
        vocab_size=ByteTokenizer.vocab_size,
        d_model=64,
        d_kv=16,
        d_ff=128,
        num_layers=2,
        num_heads=4,
        decoder_start_token_id=ByteTokenizer.pad_id,
        pad_token_id=ByteTokenizer.pad_id,
        eos_token_id=ByteTokenizer.eos_id,
    )
    model = T5ForConditionalGeneration(config)
    model.eval()
    return model


def _tiny_vision(seed: int):
    from transformers import (
        GPT2Config,
        ViTConfig,
        VisionEncoderDecoderConfig,
        VisionEncoderDecoderModel,
    )

    torch.manual_seed(seed)
    encoder = ViTConfig(
        image_size=64, patch_size=16, hidden_size=32, num_hidden_layers=2,
        num_attention_heads=2, intermediate_size=64, num_channels=3,
    )
    decoder = GPT2Config(
        vocab_size=ByteTokenizer.vocab_size, n_positions=512, n_embd=32,
        n_layer=2, n_head=2, add_cross_attention=True,
        bos_token_id=ByteTokenizer.bos_id, eos_token_id=ByteTokenizer.eos_id,
        pad_token_id=ByteTokenizer.pad_id,
    )
    config = VisionEncoderDecoderConfig.from_encoder_decoder_configs(encoder, decoder)
    model = VisionEncoderDecoderModel(config=config)
    model.config.decoder_start_token_id = ByteTokenizer.bos_id
    model.config.pad_token_id = ByteTokenizer.pad_id
    model.eval()
    return model


def _pixels(image_path: str) -> torch.Tensor:
    with Image.open(image_path) as img:
        rgb = img.convert("RGB").resize((64, 64))
        array = np.asarray(rgb, dtype=np.float32) / 127.5 - 1.0
    return torch.from_numpy(array).permute(2, 0, 1).unsqueeze(0)


class TextGenModel:
    """Greedy seq2seq text generation over byte tokens."""

    def __init__(self, model, tokenizer: ByteTokenizer | None = None):
        self.model = model
        self.tokenizer = tokenizer or ByteTokenizer()

    @classmethod
    def load(cls, model_id: str, device: str = "cpu") -> "TextGenModel":
        seed = _parse_tiny(model_id, "tiny-seq2seq")
        if seed is not None:
            return cls(_tiny_t5(seed).to(device))
        path = Path(model_id)
        if path.is_dir() and (path / MARKER).exists():
            from transformers import T5ForConditionalGeneration

            model = T5ForConditionalGeneration.from_pretrained(path)
            model.eval()
            return cls(model.to(device))
        from transformers import AutoModelForSeq2SeqLM, AutoTokenizer

        return _HubTextGenModel(
            AutoModelForSeq2SeqLM.from_pretrained(model_id).to(device),
            AutoTokenizer.from_pretrained(model_id),
        )

    @torch.no_grad()
    def complete(self, prompt: str, max_new_tokens: int) -> str:
        ids = self.tokenizer.encode(prompt, max_length=MAX_INPUT_TOKENS)
        input_ids = torch.tensor([ids], dtype=torch.long, device=self.model.device)
        out = self.model.generate(
            input_ids,
            max_new_tokens=max(1, max_new_tokens),
            min_new_tokens=2,
            do_sample=False,
            num_beams=1,
            suppress_tokens=[self.tokenizer.pad_id, self.tokenizer.bos_id],
        )
        return self.tokenizer.decode(out[0].tolist())

    def save(self, out_dir: Path) -> None:
        out_dir.mkdir(parents=True, exist_ok=True)
        self.model.save_pretrained(out_dir)
        (out_dir / MARKER).write_text(
            json.dumps({"kind": "seq2seq", "tokenizer": "byte"}) + "\n", encoding="utf-8"
        )


class _HubTextGenModel(TextGenModel):
    """Hub-backed generation with the model's own tokenizer."""

    @torch.no_grad()
    def complete(self, prompt: str, max_new_tokens: int) -> str:
        batch = self.tokenizer(prompt, return_tensors="pt", truncation=True).to(self.model.device)
        out = self.model.generate(
            **batch, max_new_tokens=max(1, max_new_tokens), do_sample=False, num_beams=1
        )
        return self.tokenizer.decode(out[0], skip_special_tokens=True)


class VisionModel:
    """Caption and VQA over one vision-encoder-decoder backbone.

    Captioning decodes from the image alone; VQA primes the decoder with the
    question bytes and returns the continuation.
    """

    def __init__(self, model):
        self.model = model
        self.tokenizer = ByteTokenizer()

    @classmethod
    def load(cls, model_id: str, device: str = "cpu") -> "VisionModel":
        seed = _parse_tiny(model_id, "tiny-vision")
        if seed is not None:
            return cls(_tiny_vision(seed).to(device))
        return _HubVisionModel(model_id, device)

    def _generate(self, image_path: str, prompt_ids: list[int], max_new_tokens: int) -> str:
        pixel_values = _pixels(image_path).to(self.model.device)
        decoder_input_ids = torch.tensor(
            [[self.tokenizer.bos_id] + prompt_ids], dtype=torch.long, device=self.model.device
        )
        with torch.no_grad():
            out = self.model.generate(
                pixel_values,
                decoder_input_ids=decoder_input_ids,
                max_new_tokens=max(1, max_new_tokens),
                min_new_tokens=2,
                do_sample=False,
                num_beams=1,
                suppress_tokens=[self.tokenizer.pad_id, self.tokenizer.bos_id],
            )
        generated = out[0].tolist()[decoder_input_ids.shape[1]:]
        return self.tokenizer.decode(generated)

    def caption(self, image_path: str, max_new_tokens: int = 30) -> str:
        return self._generate(image_path, [], max_new_tokens)

    def answer(self, image_path: str, question: str, max_new_tokens: int = 10) -> str:
        prompt_ids = self.tokenizer.encode(question, max_length=128)
        return self._generate(image_path, prompt_ids, max_new_tokens)


class _HubVisionModel(VisionModel):
    def __init__(self, model_id: str, device: str):
        from transformers import pipeline

        self._caption_pipe = pipeline("image-to-text", model=model_id, device=device)
        self._vqa_pipe = pipeline("visual-question-answering", model=model_id, device=device)

    def caption(self, image_path: str, max_new_tokens: int = 30) -> str:
        out = self._caption_pipe(image_path, max_new_tokens=max_new_tokens)
        return out[0]["generated_text"].strip()

    def answer(self, image_path: str, question: str, max_new_tokens: int = 10) -> str:
        out = self._vqa_pipe(image=image_path, question=question, top_k=1)
        return out[0]["answer"].strip()


class EmbedModel:
    """Mean-pooled, L2-normalized encoder states over byte tokens."""

    def __init__(self, encoder):
        self.encoder = encoder
        self.tokenizer = ByteTokenizer()
        self.dim = encoder.config.d_model

    @classmethod
    def load(cls, model_id: str, device: str = "cpu") -> "EmbedModel":
        seed = _parse_tiny(model_id, "tiny-encoder")
        if seed is not None:
            from transformers import T5EncoderModel

            torch.manual_seed(seed)
            from transformers import T5Config

            config = T5Config(
                vocab_size=ByteTokenizer.vocab_size, d_model=64, d_kv=16, d_ff=128,
                num_layers=2, num_heads=4, pad_token_id=ByteTokenizer.pad_id,
            )
            encoder = T5EncoderModel(config)
            encoder.eval()
            return cls(encoder.to(device))
        return _HubEmbedModel(model_id, device)

    @torch.no_grad()
    def embed(self, texts: list[str]) -> list[list[float]]:
        vectors = []
        for text in texts:
            ids = self.tokenizer.encode(text or " ", max_length=MAX_INPUT_TOKENS)
            input_ids = torch.tensor([ids], dtype=torch.long, device=self.encoder.device)
            hidden = self.encoder(input_ids).last_hidden_state[0]
            pooled = hidden.mean(dim=0)
            norm = torch.linalg.vector_norm(pooled)
            if norm > 0:
                pooled = pooled / norm
            vectors.append([float(x) for x in pooled])
        return vectors


class _HubEmbedModel(EmbedModel):
    def __init__(self, model_id: str, device: str):
        from sentence_transformers import SentenceTransformer

        self._model = SentenceTransformer(model_id, device=device)
        self.dim = self._model.get_sentence_embedding_dimension()

    def embed(self, texts: list[str]) -> list[list[float]]:
        return [[float(x) for x in v] for v in self._model.encode(texts, normalize_embeddings=True)]
