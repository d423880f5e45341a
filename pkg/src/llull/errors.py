"""Exception hierarchy shared across the pipeline."""


class LlullError(Exception):
    """Base class for all package errors."""


class IngestError(LlullError):
    """Corpus source unreadable or produced zero valid records."""


class GatewayError(LlullError):
    """Base class for model-gateway failures."""


class ProviderError(GatewayError):
    """Provider call failed after the bounded retries."""


class MalformedPayloadError(ProviderError):
    """Provider returned a payload we cannot pull a completion from."""


class CacheMissError(GatewayError):
    """Replay mode was asked for a request the cache has never seen."""


class ExtractionParseError(LlullError):
    """Model output contained no usable annotation object."""


class TemplateParseError(LlullError):
    """Template string contains no recognizable slot markers."""


class InsufficientElementsError(LlullError):
    """A disk does not hold enough elements for the requested generation."""


class RewriteError(LlullError):
    """Model rewrite produced no usable title."""


class ConfigError(LlullError):
    """Run configuration is missing, unreadable, or out of range."""
