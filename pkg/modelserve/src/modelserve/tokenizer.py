"""Byte-level tokenizer shared by the built-in tiny models.

Vocabulary is the 256 byte values offset by three specials, so any UTF-8
text round-trips without a pretrained vocab file.
"""

from __future__ import annotations

PAD_ID = 0
EOS_ID = 1
BOS_ID = 2
_OFFSET = 3
VOCAB_SIZE = 256 + _OFFSET


class ByteTokenizer:
    pad_id = PAD_ID
    eos_id = EOS_ID
    bos_id = BOS_ID
    vocab_size = VOCAB_SIZE

    def encode(self, text: str, add_eos: bool = False, max_length: int | None = None) -> list[int]:
        ids = [b + _OFFSET for b in text.encode("utf-8")]
        if max_length is not None and len(ids) > max_length:
            ids = ids[-max_length:]  # keep the tail: questions and answers end prompts
        if add_eos:
            ids.append(EOS_ID)
        return ids

    def decode(self, ids) -> str:
        data = bytes(int(i) - _OFFSET for i in ids if int(i) >= _OFFSET)
        return data.decode("utf-8", errors="replace")
