"""Exception types shared across the toolkit.

The CLI maps these onto exit codes: configuration and usage problems exit
with 2, data problems (malformed files, unknown terms) with 3, anything
else with 1.
"""


class EmbedlabError(Exception):
    """Base class for all toolkit errors."""


class ConfigError(EmbedlabError):
    """Invalid configuration value, option combination, or unusable setup."""


class FormatError(EmbedlabError):
    """Malformed file content: bad header, ragged row, undecodable bytes."""


class OovError(EmbedlabError, LookupError):
    """A query term is missing from the model vocabulary."""

    def __init__(self, term: str):
        super().__init__(f"term not in vocabulary: {term!r}")
        self.term = term
