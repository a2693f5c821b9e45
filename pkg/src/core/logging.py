"""Система логирования."""

import logging
import sys
from datetime import datetime, timezone
from pathlib import Path
from typing import Any, Dict

from pythonjsonlogger import jsonlogger

from src.core.config import settings
from src.core.constants import LOG_FORMAT, LOG_DATE_FORMAT


class JSONFormatter(jsonlogger.JsonFormatter):
    """Форматтер для вывода логов в JSON формате."""

    def add_fields(
        self,
        log_record: Dict[str, Any],
        record: logging.LogRecord,
        message_dict: Dict[str, Any],
    ) -> None:
        """Добавляет стандартные поля и разворачивает extra_data."""
        super().add_fields(log_record, record, message_dict)
        log_record["timestamp"] = datetime.now(timezone.utc).isoformat()
        log_record["level"] = record.levelname
        log_record["logger"] = record.name
        log_record["module"] = record.module
        log_record["function"] = record.funcName
        log_record["line"] = record.lineno

        # Дополнительные поля передаются через extra={"extra_data": {...}}
        extra_data = log_record.pop("extra_data", None)
        if isinstance(extra_data, dict):
            log_record.update(extra_data)


def setup_logging() -> None:
    """Настраивает систему логирования."""
    runtime = settings.runtime

    logger = logging.getLogger()
    logger.setLevel(getattr(logging, runtime.log_level.upper(), logging.WARNING))
    logger.handlers.clear()

    # stdout занят отчётами, поэтому консольный вывод идёт в stderr
    console_handler = logging.StreamHandler(sys.stderr)
    if runtime.debug:
        console_handler.setFormatter(logging.Formatter(LOG_FORMAT, LOG_DATE_FORMAT))
    else:
        console_handler.setFormatter(JSONFormatter("%(message)s"))
    logger.addHandler(console_handler)

    if runtime.log_to_file:
        logs_dir = Path(runtime.logs_directory)
        logs_dir.mkdir(parents=True, exist_ok=True)

        file_handler = logging.FileHandler(logs_dir / "app.log", encoding="utf-8")
        file_handler.setLevel(logging.DEBUG)
        file_handler.setFormatter(JSONFormatter("%(message)s"))
        logger.addHandler(file_handler)

        error_handler = logging.FileHandler(logs_dir / "errors.log", encoding="utf-8")
        error_handler.setLevel(logging.ERROR)
        error_handler.setFormatter(JSONFormatter("%(message)s"))
        logger.addHandler(error_handler)


def set_level(level: str) -> None:
    """Меняет уровень корневого логгера (флаг --log-level)."""
    logging.getLogger().setLevel(getattr(logging, level.upper(), logging.WARNING))


def get_logger(name: str) -> logging.Logger:
    """Получает логгер с указанным именем."""
    return logging.getLogger(name)


# Инициализируем логирование при импорте модуля
setup_logging()
