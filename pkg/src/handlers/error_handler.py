"""Обработчики исключений: перевод ошибок в коды завершения CLI."""

import sys
from typing import Callable, List, Optional, TextIO, Tuple, Type

from src.ci.coloring import ColoringError, ImproperColoringError
from src.ci.config_space import ConfigSpaceError
from src.ci.evolve import EvolutionError
from src.ci.integrals import IntegralError
from src.ci.slater import SlaterError
from src.core.constants import EXIT_CAP, EXIT_NUMERICAL, EXIT_USAGE
from src.core.logging import get_logger
from src.core.metrics import get_metrics_collector
from src.core.validation import CapExceededError, NumericalCheckError, ValidationError
from src.parsers.fcidump_parser import FcidumpParseError

logger = get_logger(__name__)

# (тип исключения, код завершения, имя счётчика); порядок важен для подклассов
EXCEPTION_EXIT_CODES: List[Tuple[Type[Exception], int, str]] = [
    (CapExceededError, EXIT_CAP, "errors.cap"),
    (NumericalCheckError, EXIT_NUMERICAL, "errors.numerical"),
    (ImproperColoringError, EXIT_NUMERICAL, "errors.coloring"),
    (FcidumpParseError, EXIT_USAGE, "errors.parser"),
    (ValidationError, EXIT_USAGE, "errors.validation"),
    (ConfigSpaceError, EXIT_USAGE, "errors.validation"),
    (IntegralError, EXIT_USAGE, "errors.validation"),
    (SlaterError, EXIT_USAGE, "errors.validation"),
    (EvolutionError, EXIT_USAGE, "errors.validation"),
    (ColoringError, EXIT_USAGE, "errors.validation"),
]


def exit_code_for(exc: BaseException) -> Optional[int]:
    """Код завершения для известного исключения или None."""
    for exception_type, code, _ in EXCEPTION_EXIT_CODES:
        if isinstance(exc, exception_type):
            return code
    return None


def handle_exception(exc: Exception, stream: Optional[TextIO] = None) -> int:
    """
    Обработка исключения команды: счётчик, лог и сообщение в stderr.

    Returns:
        Код завершения

    Raises:
        Exception: Неизвестные исключения пробрасываются дальше
    """
    stream = stream or sys.stderr
    metrics = get_metrics_collector()
    for exception_type, code, metric in EXCEPTION_EXIT_CODES:
        if isinstance(exc, exception_type):
            metrics.increment(metric)
            logger.error(
                f"Ошибка команды: {exc}",
                extra={"extra_data": {"error_type": type(exc).__name__, "exit_code": code}},
            )
            print(f"error: {exc}", file=stream)
            return code

    metrics.increment("errors.general")
    logger.error(f"Необработанное исключение: {exc}", exc_info=True)
    raise exc


def run_guarded(command: Callable[[], int], stream: Optional[TextIO] = None) -> int:
    """Запуск команды с переводом известных ошибок в коды завершения."""
    try:
        return command()
    except Exception as e:
        return handle_exception(e, stream)
