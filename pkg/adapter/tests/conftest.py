"""Tiny randomly initialized models built in memory.

No checkpoint downloads: the BERT-style fixture gets a handcrafted
WordPiece vocabulary (whole words for the test sentences plus single
letters as fallback pieces) and the GPT-2-style fixture a byte-level BPE
whose merges spell out a few whole words, so multi-character tokens with
the leading-space convention actually occur. Weights are seeded, so test
expectations are stable.
"""

import pytest
import torch
from tokenizers import Tokenizer, models, normalizers, pre_tokenizers, processors
from transformers import (
    BertConfig,
    BertModel,
    GPT2Config,
    GPT2Model,
    PreTrainedTokenizerFast,
)

HIDDEN = 32
LAYERS = 2


def _bert_tokenizer() -> PreTrainedTokenizerFast:
    words = [
        "the", "a", "girl", "hand", "chef", "onion", "raises",
        "her", "chopped", "won", "gold", ".",
    ]
    letters = list("abcdefghijklmnopqrstuvwxyz")
    entries = (
        ["[PAD]", "[UNK]", "[CLS]", "[SEP]", "[MASK]"]
        + words
        + letters
        + ["##" + c for c in letters]
    )
    vocab = {}
    for token in entries:  # dedupe: single letters repeat the word list
        if token not in vocab:
            vocab[token] = len(vocab)
    tok = Tokenizer(models.WordPiece(vocab, unk_token="[UNK]", max_input_chars_per_word=100))
    tok.normalizer = normalizers.BertNormalizer(lowercase=True)
    tok.pre_tokenizer = pre_tokenizers.BertPreTokenizer()
    tok.post_processor = processors.TemplateProcessing(
        single="[CLS] $A [SEP]",
        special_tokens=[("[CLS]", vocab["[CLS]"]), ("[SEP]", vocab["[SEP]"])],
    )
    return PreTrainedTokenizerFast(
        tokenizer_object=tok,
        unk_token="[UNK]",
        cls_token="[CLS]",
        sep_token="[SEP]",
        pad_token="[PAD]",
        mask_token="[MASK]",
    )


def _gpt2_tokenizer() -> PreTrainedTokenizerFast:
    alphabet = sorted(pre_tokenizers.ByteLevel.alphabet())
    vocab = {ch: i for i, ch in enumerate(alphabet)}
    merges = []
    for word in ["chef", "onion", "the"]:
        symbols = "Ġ" + word  # byte-level form of " word"
        current = symbols[0]
        for ch in symbols[1:]:
            if current + ch not in vocab:
                merges.append((current, ch))
                vocab[current + ch] = len(vocab)
            current += ch
    tok = Tokenizer(models.BPE(vocab=vocab, merges=merges))
    tok.pre_tokenizer = pre_tokenizers.ByteLevel(add_prefix_space=False)
    # keep offsets untrimmed so tokens carry their leading space, the
    # convention the extractor has to compensate for
    tok.post_processor = processors.ByteLevel(trim_offsets=False)
    return PreTrainedTokenizerFast(tokenizer_object=tok, unk_token=None)


@pytest.fixture(scope="session")
def tiny_bert():
    tokenizer = _bert_tokenizer()
    torch.manual_seed(7)
    config = BertConfig(
        vocab_size=tokenizer.vocab_size,
        hidden_size=HIDDEN,
        num_hidden_layers=LAYERS,
        num_attention_heads=4,
        intermediate_size=3 * HIDDEN,
        max_position_embeddings=64,
    )
    return BertModel(config).eval(), tokenizer


@pytest.fixture(scope="session")
def tiny_gpt2():
    tokenizer = _gpt2_tokenizer()
    torch.manual_seed(8)
    config = GPT2Config(
        vocab_size=len(tokenizer.get_vocab()),
        n_embd=HIDDEN,
        n_layer=LAYERS,
        n_head=4,
        n_positions=64,
        bos_token_id=None,
        eos_token_id=None,
    )
    return GPT2Model(config).eval(), tokenizer
