import logging
from collections.abc import Iterator
from contextlib import contextmanager
from contextvars import ContextVar
from typing import override

# Subject currently being processed in this thread/context
_current_subject: ContextVar[str] = ContextVar("fibrostage_subject", default="-")


@contextmanager
def subject_context(subject_id: str) -> Iterator[None]:
    """Tag every log record emitted inside the block with ``subject_id``."""
    token = _current_subject.set(subject_id)
    try:
        yield
    finally:
        _current_subject.reset(token)


def current_subject() -> str:
    return _current_subject.get()


class SubjectContextFilter(logging.Filter):
    """A logging filter that stamps records with the subject being processed.

    Per-subject work may run on a thread pool (``--jobs N``), so handlers see records from
    several subjects interleaved. The ``subject`` attribute keeps them attributable.
    """

    def __init__(self, name: str = "", placeholder: str = "-") -> None:
        super().__init__(name)
        self._placeholder = placeholder

    @override
    def filter(self, record: logging.LogRecord) -> bool:
        """Attach the ``subject`` attribute; never drops a record."""
        if not hasattr(record, "subject"):
            subject = _current_subject.get()
            record.subject = subject if subject else self._placeholder
        return True
