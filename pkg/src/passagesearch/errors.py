"""Exception types shared across the package."""


class PassageSearchError(Exception):
    """Base class for all errors raised by this package."""


# --- ingest ---

class MissingField(PassageSearchError):
    pass


class EmptyBody(PassageSearchError):
    pass


class DuplicateDocId(PassageSearchError):
    pass


class EmptyDocument(PassageSearchError):
    pass


class IngestError(PassageSearchError):
    """Wraps a per-record failure with its input line number."""

    def __init__(self, line_no, cause):
        super().__init__(f"line {line_no}: {cause}")
        self.line_no = line_no
        self.cause = cause


# --- index ---

class DuplicatePassageId(PassageSearchError):
    pass


class UnknownPassageRef(PassageSearchError):
    pass


class FormatVersionMismatch(PassageSearchError):
    pass


# --- retrieval ---

class EmptyQueryAfterAnalysis(PassageSearchError):
    pass


class EmptyFeedbackSet(PassageSearchError):
    pass


# --- rerank ---

class MissingWeights(PassageSearchError):
    def __init__(self, passage_id):
        super().__init__(f"no weights for passage {passage_id!r}")
        self.passage_id = passage_id


class UnknownPassageId(PassageSearchError):
    pass


class MalformedWeightFile(PassageSearchError):
    pass


# --- fusion / pooling ---

class TopicMismatch(PassageSearchError):
    pass


class NonPrefixJudgments(PassageSearchError):
    pass


# --- eval ---

class MalformedLine(PassageSearchError):
    def __init__(self, line_no, message):
        super().__init__(f"line {line_no}: {message}")
        self.line_no = line_no


class DuplicateEntry(PassageSearchError):
    pass


class NoRelevantInQrels(PassageSearchError):
    pass


class DegenerateInput(PassageSearchError):
    pass


# --- collection / topics ---

class MalformedTopic(PassageSearchError):
    pass


class DuplicateTopicId(PassageSearchError):
    pass


class EmptyTopicSet(PassageSearchError):
    pass


class InsufficientTopics(PassageSearchError):
    pass


# --- service ---

class UnknownTurn(PassageSearchError):
    pass


class UnknownTopic(PassageSearchError):
    pass


class OutOfOrderJudgment(PassageSearchError):
    pass


class InvalidGrade(PassageSearchError):
    pass


class NoRelevantPassage(PassageSearchError):
    pass


class MissingQuestion(PassageSearchError):
    pass


class Exhausted(PassageSearchError):
    pass


class ServiceUnavailable(PassageSearchError):
    pass
