"""Текстовые форматы: тройки матрицы, состояния, раскраска и отчёты ключ-значение."""

from typing import Any, Dict, Iterable, List, Mapping, Optional, Tuple

import numpy as np

from src.ci.coloring import OneSparseTerm, PairLabel
from src.ci.evolve import StateVector
from src.ci.slater import SparseCiMatrix
from src.core.constants import FLOAT_SIGNIFICANT_DIGITS, TOOL_NAME, TOOL_VERSION
from src.core.validation import ValidationError


class CiFormatter:
    """Класс для форматирования результатов в машиночитаемый текст."""

    @staticmethod
    def format_float(value: float) -> str:
        """Число с 17 значащими цифрами."""
        return f"{float(value):.{FLOAT_SIGNIFICANT_DIGITS}g}"

    @classmethod
    def format_value(cls, value: Any) -> str:
        """Значение для строки отчёта."""
        if isinstance(value, bool):
            return "true" if value else "false"
        if isinstance(value, (float, np.floating)):
            return cls.format_float(value)
        if value is None:
            return "none"
        if isinstance(value, (list, tuple)):
            return ",".join(cls.format_value(item) for item in value)
        if hasattr(value, "value") and isinstance(getattr(value, "value"), str):
            return value.value
        return str(value)

    @classmethod
    def flatten(cls, data: Mapping[str, Any], prefix: str = "") -> List[Tuple[str, str]]:
        """Вложенный словарь в пары ключ-значение с ключами через точку."""
        items: List[Tuple[str, str]] = []
        for key, value in data.items():
            full_key = f"{prefix}{key}"
            if isinstance(value, Mapping):
                items.extend(cls.flatten(value, f"{full_key}."))
            else:
                items.append((full_key, cls.format_value(value)))
        return items

    @classmethod
    def format_report(cls, sections: Mapping[str, Any], config: Optional[Mapping[str, Any]] = None) -> str:
        """
        Отчёт в виде строк `key: value`.

        Первые строки - имя и версия инструмента, затем конфигурация запуска.
        """
        lines = [f"tool: {TOOL_NAME}", f"version: {TOOL_VERSION}"]
        if config:
            lines.extend(f"{key}: {value}" for key, value in cls.flatten(config, "config."))
        lines.extend(f"{key}: {value}" for key, value in cls.flatten(sections))
        return "\n".join(lines) + "\n"

    @classmethod
    def format_triplets(cls, matrix: SparseCiMatrix) -> str:
        """Верхний треугольник матрицы: `q_row q_col value` после заголовка."""
        params = matrix.params
        lines = [f"# {params.n_o} {params.n_e} {matrix.dimension}"]
        lines.extend(f"{t.row} {t.col} {cls.format_float(t.value)}" for t in matrix.triplets)
        return "\n".join(lines) + "\n"

    @classmethod
    def format_state(cls, state: StateVector) -> str:
        """Строки `q re im` для всех амплитуд."""
        return "".join(
            f"{q} {cls.format_float(amplitude.real)} {cls.format_float(amplitude.imag)}\n"
            for q, amplitude in enumerate(state.amplitudes)
        )

    @staticmethod
    def parse_state(text: str, dim: int) -> StateVector:
        """
        Разбор файла состояния; отсутствующие ранги равны нулю.

        Raises:
            ValidationError: Ошибка формата с номером строки
        """
        amplitudes = np.zeros(dim, dtype=complex)
        seen = set()
        for line_number, line in enumerate(text.splitlines(), start=1):
            stripped = line.strip()
            if not stripped or stripped.startswith("#"):
                continue
            fields = stripped.split()
            if len(fields) != 3:
                raise ValidationError(f"Файл состояния, строка {line_number}: ожидалось 3 поля")
            try:
                q = int(fields[0])
                amplitude = complex(float(fields[1]), float(fields[2]))
            except ValueError:
                raise ValidationError(f"Файл состояния, строка {line_number}: нечисловое значение")
            if not 0 <= q < dim:
                raise ValidationError(f"Файл состояния, строка {line_number}: ранг {q} вне [0, {dim})")
            if q in seen:
                raise ValidationError(f"Файл состояния, строка {line_number}: ранг {q} повторяется")
            seen.add(q)
            amplitudes[q] = amplitude
        norm = np.linalg.norm(amplitudes)
        if norm == 0.0:
            raise ValidationError("Файл состояния не содержит ненулевых амплитуд")
        return StateVector(amplitudes / norm)

    @staticmethod
    def coloring_rows(terms: Iterable[OneSparseTerm]) -> Tuple[List[Tuple[int, int, int, int]], Dict[int, str]]:
        """
        Рёбра раскраски (q_low, q_high, класс, id цвета) и легенда id -> метка.

        Диагональ получает id 0 и в список рёбер не входит.
        """
        rows: List[Tuple[int, int, int, int]] = []
        legend: Dict[int, str] = {}
        for color_id, term in enumerate(terms):
            legend[color_id] = term.color.label
            if term.is_diagonal:
                continue
            if isinstance(term.color, PairLabel):
                excitation_class = term.color.excitation_class
            else:
                excitation_class = term.color.sort_key[0]
            rows.extend((q1, q2, excitation_class, color_id) for q1, q2, _ in term.pairs)
        rows.sort()
        return rows, legend

    @classmethod
    def format_coloring(cls, terms: List[OneSparseTerm]) -> str:
        """Строки `q_low q_high class color_id` с легендой `# color_id label`."""
        rows, legend = cls.coloring_rows(terms)
        lines = [f"# {color_id} {label}" for color_id, label in legend.items()]
        lines.extend(f"{q_low} {q_high} {excitation_class} {color_id}" for q_low, q_high, excitation_class, color_id in rows)
        return "\n".join(lines) + "\n"


# Глобальный экземпляр форматтера
ci_formatter = CiFormatter()
