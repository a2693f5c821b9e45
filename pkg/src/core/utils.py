"""
Утилиты для файловых операций.
"""

import os
import tempfile
from pathlib import Path
from typing import Union

from src.core.constants import TEMP_FILE_PREFIX
from src.core.logging import get_logger

logger = get_logger(__name__)


def atomic_write_text(path: Union[str, Path], text: str) -> Path:
    """
    Атомарная запись текста: временный файл в том же каталоге + переименование.

    Args:
        path: Путь к итоговому файлу
        text: Содержимое

    Returns:
        Path к записанному файлу
    """
    target = Path(path)
    target.parent.mkdir(parents=True, exist_ok=True)

    fd, temp_name = tempfile.mkstemp(prefix=TEMP_FILE_PREFIX, dir=target.parent)
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as handle:
            handle.write(text)
        os.replace(temp_name, target)
    except BaseException:
        try:
            os.unlink(temp_name)
        except OSError as e:
            logger.warning(f"Ошибка удаления временного файла {temp_name}: {e}")
        raise

    logger.debug(f"Записан файл: {target}")
    return target


def ceil_log2(value: int) -> int:
    """Число бит для индексации value значений (0 для value <= 1)."""
    if value <= 1:
        return 0
    return (value - 1).bit_length()
