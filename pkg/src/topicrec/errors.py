"""Exception types shared across the package."""


class TopicRecError(Exception):
    """Base class for all topicrec errors."""


class IngestError(TopicRecError):
    """A corpus file is unreadable, or strict mode hit an invalid record."""


class UnknownUserError(TopicRecError):
    """User id has no record in the follow or profile corpora."""


class NoExpertFollowingsError(TopicRecError):
    """User follows no mined experts, so no interests can be inferred."""


class DegenerateModelError(TopicRecError):
    """An EM normalizer collapsed to zero; inputs were not smoothed."""


class SpecError(TopicRecError):
    """Synthetic-corpus spec is infeasible or inconsistent."""
