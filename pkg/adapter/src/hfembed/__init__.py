"""Layered hidden-state extraction from pretrained transformers."""

from .archive import ExtractedSentence, layer_names, write_archive
from .errors import (
    ExtractionError,
    HfEmbedError,
    InputFileError,
    ModelLoadError,
)
from .extract import (
    ExtractionSpec,
    extract,
    extract_sentences,
    load_model,
    read_texts_jsonl,
)

__all__ = [
    "ExtractedSentence",
    "ExtractionError",
    "ExtractionSpec",
    "HfEmbedError",
    "InputFileError",
    "ModelLoadError",
    "extract",
    "extract_sentences",
    "layer_names",
    "load_model",
    "read_texts_jsonl",
    "write_archive",
]
