"""Tests for logging setup and subject tagging."""

import logging
from pathlib import Path

import pytest

from fibrostage.common.utils import ordered_map
from fibrostage.core.logger import SubjectContextFilter, current_subject, get_logger, setup_logging, subject_context
from fibrostage.core.logger.logger import ROOT_LOGGER
from fibrostage.core.settings import LoggingConfig


def _record() -> logging.LogRecord:
    return logging.LogRecord("fibrostage.test", logging.INFO, __file__, 1, "message", None, None)


class TestSubjectContext:
    """Tests for subject_context and SubjectContextFilter."""

    def test_default_placeholder(self):
        record = _record()
        assert SubjectContextFilter().filter(record)
        assert record.subject == "-"

    def test_subject_inside_block(self):
        with subject_context("S07"):
            assert current_subject() == "S07"
            record = _record()
            SubjectContextFilter().filter(record)
        assert record.subject == "S07"
        assert current_subject() == "-"

    def test_nested_blocks(self):
        with subject_context("A"):
            with subject_context("B"):
                assert current_subject() == "B"
            assert current_subject() == "A"

    def test_existing_attribute_kept(self):
        record = _record()
        record.subject = "preset"
        with subject_context("S01"):
            SubjectContextFilter().filter(record)
        assert record.subject == "preset"

    def test_context_reaches_worker_threads(self):
        def tagged(item: int) -> str:
            return f"{current_subject()}:{item}"

        with subject_context("S03"):
            assert ordered_map(tagged, range(4), jobs=3) == ["S03:0", "S03:1", "S03:2", "S03:3"]


class TestSetupLogging:
    """Tests for setup_logging."""

    def test_get_logger_namespace(self):
        assert get_logger("modules.reg").name == "fibrostage.modules.reg"
        assert get_logger().name == ROOT_LOGGER

    def test_module_loggers_defer_to_root_handlers(self):
        logger = get_logger("modules.staging.service")
        assert logger.handlers == []
        assert logger.propagate

    def test_log_file_records_subject(self, tmp_path: Path):
        config = LoggingConfig(level="debug", file="run.log", format="[%(subject)s] %(name)s %(message)s")
        setup_logging(config, tmp_path)
        with subject_context("S42"):
            get_logger("tests").info("hello")
        for handler in logging.getLogger().handlers:
            handler.flush()
        assert "[S42] fibrostage.tests hello" in (tmp_path / "run.log").read_text(encoding="utf-8")

    def test_module_levels(self, tmp_path: Path):
        config = LoggingConfig(module_levels={"fibrostage.quiet": "error"})
        setup_logging(config, tmp_path)
        assert logging.getLogger("fibrostage.quiet").level == logging.ERROR
        assert logging.getLogger().level == logging.INFO

    def test_invalid_level(self):
        with pytest.raises(ValueError):
            _ = LoggingConfig(level="verbose")
