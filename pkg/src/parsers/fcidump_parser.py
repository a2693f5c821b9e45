"""Парсер FCIDUMP файлов (интегралы в химической нотации)."""

import math
import re
from pathlib import Path
from typing import Dict, Iterable, List, Optional, TextIO, Tuple, Union

from src.ci.integrals import (
    IntegralError,
    IntegralTable,
    IntegralTableBuilder,
    Spin,
    SpinOrbitalMap,
)
from src.core.logging import get_logger

logger = get_logger(__name__)

REQUIRED_HEADER_KEYS = ("NORB", "NELEC", "MS2")

_HEADER_PAIR = re.compile(
    r"([A-Za-z][A-Za-z0-9_]*)\s*=\s*(.*?)(?=[\s,]*[A-Za-z][A-Za-z0-9_]*\s*=|$)",
    re.S,
)


class FcidumpParseError(Exception):
    """Исключение для ошибок парсера FCIDUMP."""

    def __init__(self, message: str, line_number: Optional[int] = None):
        prefix = f"строка {line_number}: " if line_number is not None else ""
        super().__init__(f"{prefix}{message}")
        self.line_number = line_number


class FcidumpParser:
    """Парсер FCIDUMP: заголовок NORB/NELEC/MS2 и строки `value i j k l`."""

    def __init__(self, tolerance: Optional[float] = None):
        self.tolerance = tolerance
        self.stats: Dict[str, int] = {}

    def parse_file(self, file_path: Union[str, Path]) -> IntegralTable:
        """Парсит FCIDUMP файл с диска."""
        path = Path(file_path)
        if not path.is_file():
            raise FcidumpParseError(f"Файл не найден: {path}")
        return self.parse_lines(self._decode_lines(path.read_bytes()))

    def parse_text(self, text: str) -> IntegralTable:
        """Парсит FCIDUMP из строки."""
        return self.parse_lines(text.splitlines())

    def parse_stream(self, stream: TextIO) -> IntegralTable:
        """Парсит FCIDUMP из текстового потока."""
        try:
            lines = [line.rstrip("\n") for line in stream]
        except UnicodeDecodeError as e:
            raise FcidumpParseError(f"Поток не в кодировке UTF-8: {e.reason}")
        return self.parse_lines(lines)

    @staticmethod
    def _decode_lines(raw: bytes) -> List[str]:
        """Построчное декодирование UTF-8 с номером строки в ошибке."""
        lines = []
        for line_number, line in enumerate(raw.splitlines(), start=1):
            try:
                lines.append(line.decode("utf-8"))
            except UnicodeDecodeError as e:
                raise FcidumpParseError(
                    f"Строка не в кодировке UTF-8 (байт {e.start + 1}: {e.reason})", line_number
                )
        return lines

    def parse_lines(self, lines: Iterable[str]) -> IntegralTable:
        """
        Разбирает заголовок и строки интегралов.

        Raises:
            FcidumpParseError: Ошибка формата с номером строки
        """
        numbered = list(enumerate(lines, start=1))
        header, body_start, header_end_line = self._split_header(numbered)
        n_orb, n_elec, ms2 = self._parse_header(header, header_end_line)

        mapping = SpinOrbitalMap(n_orb)
        builder = IntegralTableBuilder(mapping.n_spin_orbitals, tolerance=self.tolerance)
        self.stats = {"one_body": 0, "two_body": 0, "core": 0, "orbital_energy": 0}

        for line_number, line in numbered[body_start:]:
            stripped = line.strip()
            if not stripped:
                continue
            value, indices = self._parse_integral_line(stripped, line_number, n_orb)
            try:
                self._store(builder, mapping, value, indices)
            except IntegralError as e:
                raise FcidumpParseError(str(e), line_number)

        table = builder.build(n_electrons=n_elec, ms2=ms2)
        logger.info(
            "FCIDUMP разобран",
            extra={"extra_data": {"norb": n_orb, "nelec": n_elec, **self.stats}},
        )
        return table

    def _split_header(
        self, numbered: List[Tuple[int, str]]
    ) -> Tuple[str, int, int]:
        """Отделяет заголовок от строк интегралов."""
        header_parts: List[str] = []
        for index, (line_number, line) in enumerate(numbered):
            stripped = line.strip()
            if not stripped:
                continue
            upper = stripped.upper()
            if upper in ("&END", "/") or upper.endswith("&END") or upper.endswith("/"):
                header_parts.append(re.sub(r"(&END|/)\s*$", "", stripped, flags=re.I))
                return " ".join(header_parts), index + 1, line_number
            if header_parts and self._looks_like_integral(stripped):
                return " ".join(header_parts), index, line_number
            header_parts.append(stripped)
        last_line = numbered[-1][0] if numbered else 0
        return " ".join(header_parts), len(numbered), last_line

    @staticmethod
    def _looks_like_integral(line: str) -> bool:
        fields = line.split()
        if len(fields) != 5:
            return False
        try:
            float(fields[0].replace("D", "E").replace("d", "e"))
            [int(field) for field in fields[1:]]
        except ValueError:
            return False
        return True

    def _parse_header(self, header: str, line_number: int) -> Tuple[int, int, int]:
        """Извлекает NORB, NELEC, MS2 из текста заголовка."""
        text = re.sub(r"^\s*&FCI\b", "", header, flags=re.I)
        values: Dict[str, str] = {}
        for key, raw in _HEADER_PAIR.findall(text):
            values[key.upper()] = raw.strip().strip(",").strip()

        missing = [key for key in REQUIRED_HEADER_KEYS if key not in values]
        if missing:
            raise FcidumpParseError(f"В заголовке нет ключей: {', '.join(missing)}", line_number)

        parsed = []
        for key in REQUIRED_HEADER_KEYS:
            try:
                parsed.append(int(values[key]))
            except ValueError:
                raise FcidumpParseError(f"Нечисловое значение {key}={values[key]!r}", line_number)
        n_orb, n_elec, ms2 = parsed
        if n_orb < 1:
            raise FcidumpParseError(f"NORB должен быть положительным: {n_orb}", line_number)
        if not 0 <= n_elec <= 2 * n_orb:
            raise FcidumpParseError(f"NELEC={n_elec} вне диапазона [0, {2 * n_orb}]", line_number)
        return n_orb, n_elec, ms2

    @staticmethod
    def _parse_integral_line(
        line: str, line_number: int, n_orb: int
    ) -> Tuple[float, Tuple[int, int, int, int]]:
        fields = line.split()
        if len(fields) != 5:
            raise FcidumpParseError(f"Ожидалось 5 полей, получено {len(fields)}", line_number)
        try:
            value = float(fields[0].replace("D", "E").replace("d", "e"))
        except ValueError:
            raise FcidumpParseError(f"Нечисловое значение интеграла: {fields[0]!r}", line_number)
        if not math.isfinite(value):
            raise FcidumpParseError(f"Значение интеграла не конечно: {fields[0]!r}", line_number)
        try:
            indices = tuple(int(field) for field in fields[1:])
        except ValueError:
            raise FcidumpParseError(f"Нечисловые индексы: {' '.join(fields[1:])}", line_number)
        for index in indices:
            if not 0 <= index <= n_orb:
                raise FcidumpParseError(f"Индекс орбитали {index} вне диапазона [0, {n_orb}]", line_number)
        return value, indices  # type: ignore[return-value]

    def _store(
        self,
        builder: IntegralTableBuilder,
        mapping: SpinOrbitalMap,
        value: float,
        indices: Tuple[int, int, int, int],
    ) -> None:
        """Раскладывает пространственный интеграл по спиновым каналам."""
        i, j, k, l = indices
        spins = (Spin.ALPHA, Spin.BETA)

        if i == j == k == l == 0:
            builder.set_core_energy(value)
            self.stats["core"] += 1
            return

        if i > 0 and j > 0 and k == 0 and l == 0:
            for spin in spins:
                builder.set_one_body(
                    mapping.to_spin_orbital(i, spin), mapping.to_spin_orbital(j, spin), value
                )
            self.stats["one_body"] += 1
            return

        if i > 0 and j == k == l == 0:
            # Орбитальные энергии в интегралы не входят
            self.stats["orbital_energy"] += 1
            return

        if i > 0 and j > 0 and k > 0 and l > 0:
            # (ij|kl) = <ik|jl> для каждой пары спинов
            for spin_1 in spins:
                for spin_2 in spins:
                    builder.set_two_body(
                        mapping.to_spin_orbital(i, spin_1),
                        mapping.to_spin_orbital(k, spin_2),
                        mapping.to_spin_orbital(j, spin_1),
                        mapping.to_spin_orbital(l, spin_2),
                        value,
                    )
            self.stats["two_body"] += 1
            return

        raise IntegralError(f"Недопустимая комбинация индексов {indices}")


def parse_fcidump(stream: Union[TextIO, str]) -> IntegralTable:
    """Разбор FCIDUMP из потока или строки."""
    parser = FcidumpParser()
    if isinstance(stream, str):
        return parser.parse_text(stream)
    return parser.parse_stream(stream)
