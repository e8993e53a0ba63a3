"""Exception types shared across the toolkit."""


class ToolkitError(Exception):
    """Base class for all dialspeech errors."""


class ConfigError(ToolkitError):
    """Bad or unresolvable configuration."""


# --- audio ---------------------------------------------------------------

class UndecodableAudio(ToolkitError):
    """The payload could not be decoded as audio."""


class SpecMismatch(ToolkitError):
    """Declared audio spec is inconsistent with the actual payload."""


class MissingChannelMap(ToolkitError):
    """Two-channel conversational audio requires a channel map."""


class ChannelCountMismatch(ToolkitError):
    """Channel map indices do not match the source channel count."""


# --- corpus --------------------------------------------------------------

class UnknownIsoCode(ToolkitError):
    """ISO 639-3 code is not in the configured variety registry."""


class SubdivisionWithoutCountry(ToolkitError):
    """A subdivision token is only valid together with a country."""


class UnknownLocation(ToolkitError):
    """Country absent from the geo lookup table."""


class UnmappedDomain(ToolkitError):
    """Raw domain label absent from the theme table."""


class MissingAudio(ToolkitError):
    """Audio path named by a manifest row cannot be resolved."""


class MalformedRow(ToolkitError):
    """Manifest row cannot be parsed into the utterance schema."""


class EmptyCorpus(ToolkitError):
    """An operation that needs records received none."""


class DuplicateUtteranceId(ToolkitError):
    """The same utterance_id appeared more than once."""


# --- profiling -----------------------------------------------------------

class OutOfRangeScore(ToolkitError):
    """Score outside its documented range."""


class MissingScores(ToolkitError):
    """Records lack a score field required by an aggregation."""

    def __init__(self, utterance_ids):
        self.utterance_ids = list(utterance_ids)
        preview = ", ".join(self.utterance_ids[:5])
        if len(self.utterance_ids) > 5:
            preview += ", ..."
        super().__init__(f"{len(self.utterance_ids)} records missing scores: {preview}")


class LengthMismatch(ToolkitError):
    """Paired sequences have different lengths."""


class ZeroVariance(ToolkitError):
    """A constant sequence has no defined correlation."""
