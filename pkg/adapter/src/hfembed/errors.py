"""Exception taxonomy. Everything raised on purpose derives from HfEmbedError."""


class HfEmbedError(Exception):
    """Base class for expected failures."""


class InputFileError(HfEmbedError):
    """A texts file is missing, unreadable, or malformed."""


class ModelLoadError(HfEmbedError):
    """A checkpoint or tokenizer could not be loaded."""


class ExtractionError(HfEmbedError):
    """A sentence could not be embedded or its offsets could not be mapped."""
