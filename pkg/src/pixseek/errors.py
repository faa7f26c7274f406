"""Exception types shared across the package."""


class PixseekError(Exception):
    """Base class for every error raised by pixseek."""


# --- catalog ---------------------------------------------------------------


class RootNotFound(PixseekError):
    """The catalog root does not exist."""


class RootNotADirectory(PixseekError):
    """The catalog root exists but is not a directory."""


class RootMismatch(PixseekError):
    """Two snapshots being compared were taken from different roots."""


class DecodeError(PixseekError):
    """An image file could not be decoded; the caller skips the entry."""


# --- models ----------------------------------------------------------------


class ModelFileMissing(PixseekError):
    """A descriptor points at a model file that does not exist."""


class GraphSignatureMismatch(PixseekError):
    """The model file's signature does not fit the declared role."""


class InferenceFailure(PixseekError):
    """The inference engine failed at runtime."""


class EmptyPrompt(PixseekError):
    """The detector was handed an empty (or whitespace-only) prompt."""


class DegenerateBox(PixseekError):
    """A crop box has zero area after clamping to the image bounds."""


# --- feature index ----------------------------------------------------------


class DimensionMismatch(PixseekError):
    """Vector lengths do not agree."""


class ZeroVector(PixseekError):
    """Cosine similarity is undefined for a zero-norm vector."""


class ModelMismatch(PixseekError):
    """Query and index were produced by different models."""


class RevisionMismatch(PixseekError):
    """The model file changed since the index was built; rebuild required."""


class ChecksumMismatch(PixseekError):
    """Stored feature matrix bytes do not match the manifest checksum."""


class SchemaUnsupported(PixseekError):
    """The persisted index uses a schema version this build cannot read."""


class IndexInconsistent(PixseekError):
    """Manifest and matrix file disagree (row count, dimension, or size)."""


class StaleIndex(PixseekError):
    """The catalog changed since the index was built; update it first."""


# --- query pipeline ---------------------------------------------------------


class EmptyCatalog(PixseekError):
    """A query was attempted against a catalog with no images."""


class PromptNotFound(PixseekError):
    """No catalog image produced a detection above the threshold.

    Replaces the otherwise non-terminating retry loop: sampling is without
    replacement and bounded, so exhaustion is a first-class outcome.
    """

    def __init__(self, prompt: str, attempts: int, detector_calls: int):
        super().__init__(
            f"prompt {prompt!r} not detected in any of {attempts} sampled images"
        )
        self.prompt = prompt
        self.attempts = attempts
        self.detector_calls = detector_calls


class EmptyResults(PixseekError):
    """Accuracy is undefined for an empty result list."""


class ConfigError(PixseekError):
    """A configuration file or environment override could not be parsed."""
