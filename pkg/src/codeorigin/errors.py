"""Exception hierarchy.

Everything raised on purpose by the package derives from ``CodeOriginError``.
Subclasses of ``InputError`` describe bad input data or arguments (the CLI
maps them to exit code 1); the rest are runtime failures (exit code 2).
"""


class CodeOriginError(Exception):
    pass


class InputError(CodeOriginError):
    pass


class LexError(InputError):
    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} at offset {offset}")
        self.offset = offset


class RenameError(InputError):
    pass


class RenameCollisionError(RenameError):
    pass


class MissingRenameError(RenameError):
    pass


class PreprocessError(InputError):
    """A rewriting rule failed on one snippet; the original error is ``__cause__``."""

    def __init__(self, snippet_id: str, cause: Exception):
        super().__init__(f"snippet {snippet_id!r}: {cause}")
        self.snippet_id = snippet_id
        self.cause = cause


class CorpusError(InputError):
    pass


class DuplicateIdError(CorpusError):
    def __init__(self, snippet_id: str):
        super().__init__(f"duplicate snippet id {snippet_id!r}")
        self.snippet_id = snippet_id


class UnmatchedPairError(CorpusError):
    def __init__(self, keys):
        self.keys = sorted(keys)
        super().__init__(f"pairing keys present for only one origin: {', '.join(self.keys)}")


class SplitError(InputError):
    pass


class TrainingError(InputError):
    pass


class ArtifactError(InputError):
    pass


class ArtifactVersionError(ArtifactError):
    pass


class UndefinedEffectError(InputError):
    pass


class UnmappedVerdictError(InputError):
    def __init__(self, baseline_id: str, answer_text: str):
        super().__init__(f"{baseline_id}: no mapping for answer {answer_text!r}")
        self.baseline_id = baseline_id
        self.answer_text = answer_text


class ReplayMissError(InputError):
    def __init__(self, snippet_id: str):
        super().__init__(f"snippet {snippet_id!r} not found in replay fixture")
        self.snippet_id = snippet_id


class BaselineTransportError(CodeOriginError):
    pass
