from fibrostage.core.logger.filters import SubjectContextFilter, current_subject, subject_context
from fibrostage.core.logger.logger import get_logger
from fibrostage.core.logger.logging_config import setup_logging

__all__ = ["SubjectContextFilter", "current_subject", "get_logger", "setup_logging", "subject_context"]
