"""Элементы CI-матрицы по правилам Слэтера и сборка разреженной матрицы.

Независимая проверка - прямое применение гамильтониана во вторичном
квантовании к битовым маскам со знаками Жордана-Вигнера.
"""

import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, List, NamedTuple, Optional, Tuple

import numpy as np
from scipy import sparse

from src.ci.config_space import (
    Configuration,
    Rank,
    SpaceParams,
    configurations,
    neighbors,
    orbital_list,
    rank,
    validate_configuration,
)
from src.ci.integrals import IntegralTable
from src.core.config import settings
from src.core.logging import get_logger
from src.core.metrics import get_metrics_collector
from src.core.validation import ensure_within_cap

logger = get_logger(__name__)


class SlaterError(Exception):
    """Исключение для ошибок вычисления элементов матрицы."""
    pass


class SignMode(str, Enum):
    """Учёт перестановочной чётности в правилах Слэтера."""
    FERMIONIC = "fermionic"
    PAPER_LITERAL = "paper-literal"


class MatrixElement(NamedTuple):
    """Ненулевой (структурно) элемент H[row, col]."""
    row: Rank
    col: Rank
    value: float

    @property
    def sign_bit(self) -> int:
        """Бит знака полярного представления: 1 для отрицательных."""
        return 1 if self.value < 0 else 0

    @property
    def magnitude(self) -> float:
        return abs(self.value)


@dataclass
class SparseCiMatrix:
    """CI-матрица: верхний треугольник с диагональю в порядке (row, col)."""
    params: SpaceParams
    table: IntegralTable
    triplets: List[MatrixElement]
    max_abs: float = 0.0
    mode: SignMode = SignMode.FERMIONIC
    _entries: Optional[Dict[Tuple[Rank, Rank], float]] = field(default=None, repr=False)

    @property
    def dimension(self) -> int:
        return self.params.dimension

    @property
    def entries(self) -> Dict[Tuple[Rank, Rank], float]:
        """Словарь (row, col) -> value для row <= col."""
        if self._entries is None:
            self._entries = {(t.row, t.col): t.value for t in self.triplets}
        return self._entries

    def value(self, row: Rank, col: Rank) -> float:
        """Элемент H[row, col] (0 вне структуры)."""
        key = (row, col) if row <= col else (col, row)
        return self.entries.get(key, 0.0)

    def diagonal(self) -> np.ndarray:
        result = np.zeros(self.dimension)
        for t in self.triplets:
            if t.row == t.col:
                result[t.row] = t.value
        return result

    def row_structure_counts(self) -> np.ndarray:
        """Число структурных элементов в каждой строке полной матрицы."""
        counts = np.zeros(self.dimension, dtype=np.int64)
        for t in self.triplets:
            counts[t.row] += 1
            if t.row != t.col:
                counts[t.col] += 1
        return counts

    def to_sparse(self) -> sparse.csr_matrix:
        """Полная симметричная матрица в формате CSR."""
        rows, cols, values = [], [], []
        for t in self.triplets:
            rows.append(t.row)
            cols.append(t.col)
            values.append(t.value)
            if t.row != t.col:
                rows.append(t.col)
                cols.append(t.row)
                values.append(t.value)
        n = self.dimension
        return sparse.csr_matrix((values, (rows, cols)), shape=(n, n), dtype=float)

    def to_dense(self) -> np.ndarray:
        return self.to_sparse().toarray()


def excitation_degree(x: Configuration, y: Configuration) -> int:
    """Число орбиталей, занятых в x и свободных в y."""
    return (x & ~y).bit_count()


def _between(x: Configuration, a: int, b: int) -> int:
    """Число занятых в x орбиталей строго между a и b."""
    low, high = (a, b) if a < b else (b, a)
    mask = ((1 << (high - 1)) - 1) & ~((1 << low) - 1)
    return (x & mask).bit_count()


def _single_exchange_parity(state: Configuration, removed: int, added: int) -> int:
    """Знак a+_added a_removed на state."""
    return -1 if _between(state, removed, added) % 2 else 1


def excitation_parity(x: Configuration, y: Configuration) -> int:
    """
    Знак максимального совпадения для пары конфигураций степени 1 или 2.

    Для степени 2 с p<q из x\\y и r<s из y\\x знак равен
    <x| a+_p a+_q a_s a_r |y> = <x| (a+_p a_r)(a+_q a_s) |y>.
    """
    created = orbital_list(x & ~y)
    removed = orbital_list(y & ~x)
    if len(created) == 1:
        return _single_exchange_parity(y, removed[0], created[0])
    if len(created) == 2:
        p, q = created
        r, s = removed
        first = _single_exchange_parity(y, s, q)
        middle = y ^ (1 << (s - 1)) ^ (1 << (q - 1))
        return first * _single_exchange_parity(middle, r, p)
    raise SlaterError(f"Чётность определена только для степени 1 или 2, получено {len(created)}")


def _check_pair(x: Configuration, y: Configuration, table: IntegralTable) -> None:
    if x < 0 or y < 0 or x.bit_count() != y.bit_count():
        raise SlaterError(f"Конфигурации {x} и {y} из разных пространств")
    if max(x, y).bit_length() > table.n_so:
        raise SlaterError(
            f"Таблица интегралов покрывает {table.n_so} орбиталей, требуется {max(x, y).bit_length()}"
        )


def matrix_element(
    x: Configuration,
    y: Configuration,
    table: IntegralTable,
    mode: SignMode = SignMode.FERMIONIC,
) -> float:
    """
    Элемент <x|H|y> по правилам Слэтера (без энергии ядер).

    Args:
        x: Конфигурация строки
        y: Конфигурация столбца
        table: Интегралы по спин-орбиталям
        mode: Учёт перестановочной чётности

    Raises:
        SlaterError: Конфигурации из разных пространств
    """
    _check_pair(x, y, table)
    degree = excitation_degree(x, y)

    if degree == 0:
        occupied = orbital_list(x)
        value = sum(table.one_electron(i, i) for i in occupied)
        for a, i in enumerate(occupied):
            for j in occupied[a + 1:]:
                value += table.antisymmetrized(i, j, i, j)
        return value

    if degree == 1:
        (d,) = orbital_list(x & ~y)
        (u,) = orbital_list(y & ~x)
        value = table.one_electron(d, u)
        for l in orbital_list(x & y):
            value += table.antisymmetrized(d, l, u, l)
    elif degree == 2:
        p, q = orbital_list(x & ~y)
        r, s = orbital_list(y & ~x)
        value = table.antisymmetrized(p, q, r, s)
    else:
        return 0.0

    if mode == SignMode.FERMIONIC:
        value *= excitation_parity(x, y)
    return value


def _annihilate(state: Configuration, orbital: int) -> Optional[Tuple[int, Configuration]]:
    bit = 1 << (orbital - 1)
    if not state & bit:
        return None
    sign = -1 if (state & (bit - 1)).bit_count() % 2 else 1
    return sign, state ^ bit


def _create(state: Configuration, orbital: int) -> Optional[Tuple[int, Configuration]]:
    bit = 1 << (orbital - 1)
    if state & bit:
        return None
    sign = -1 if (state & (bit - 1)).bit_count() % 2 else 1
    return sign, state | bit


def second_quantized_column(
    y: Configuration, table: IntegralTable, n_o: int
) -> Dict[Configuration, float]:
    """
    H|y> = sum h_pq a+_p a_q |y> + 1/2 sum <pq|rs> a+_p a+_q a_s a_r |y>.

    Returns:
        Словарь x -> <x|H|y> для всех достижимых x
    """
    column: Dict[Configuration, float] = {}
    orbitals = range(1, n_o + 1)
    occupied = orbital_list(y)

    for q in occupied:
        step = _annihilate(y, q)
        sign_q, after_q = step
        for p in orbitals:
            h = table.one_electron(p, q)
            if h == 0.0:
                continue
            created = _create(after_q, p)
            if created is None:
                continue
            sign_p, x = created
            column[x] = column.get(x, 0.0) + sign_p * sign_q * h

    for r in occupied:
        sign_r, after_r = _annihilate(y, r)
        for s in occupied:
            step = _annihilate(after_r, s)
            if step is None:
                continue
            sign_s, after_s = step
            for q in orbitals:
                created_q = _create(after_s, q)
                if created_q is None:
                    continue
                sign_q, after_q = created_q
                for p in orbitals:
                    v = table.two_electron(p, q, r, s)
                    if v == 0.0:
                        continue
                    created_p = _create(after_q, p)
                    if created_p is None:
                        continue
                    sign_p, x = created_p
                    sign = sign_r * sign_s * sign_q * sign_p
                    column[x] = column.get(x, 0.0) + 0.5 * sign * v
    return column


def second_quantized_oracle(
    x: Configuration,
    y: Configuration,
    table: IntegralTable,
    params: SpaceParams,
    max_orbitals: Optional[int] = None,
) -> float:
    """
    <x|H|y> прямой фермионной алгеброй (эталон для режима fermionic).

    Raises:
        CapExceededError: Пространство больше допустимого для перебора
        SlaterError: Таблица не покрывает пространство
    """
    limit = max_orbitals if max_orbitals is not None else settings.limits.oracle_max_orbitals
    ensure_within_cap("oracle_max_orbitals", params.n_o, limit)
    validate_configuration(x, params)
    validate_configuration(y, params)
    if table.n_so < params.n_o:
        raise SlaterError(f"Таблица интегралов покрывает {table.n_so} орбиталей из {params.n_o}")
    return second_quantized_column(y, table, params.n_o).get(x, 0.0)


def _build_rows(
    ranks: List[Rank],
    configs: List[Configuration],
    params: SpaceParams,
    table: IntegralTable,
    mode: SignMode,
) -> List[MatrixElement]:
    """Элементы строк с col >= row."""
    result: List[MatrixElement] = []
    for row in ranks:
        x = configs[row]
        targets = [x] + [y for degree in (1, 2) for y in neighbors(x, degree, params) if y > x]
        targets.sort()
        for y in targets:
            col = row if y == x else rank(y, params)
            result.append(MatrixElement(row, col, matrix_element(x, y, table, mode)))
    return result


def build_ci_matrix(
    params: SpaceParams,
    table: IntegralTable,
    mode: SignMode = SignMode.FERMIONIC,
    max_dimension: Optional[int] = None,
    max_workers: Optional[int] = None,
) -> SparseCiMatrix:
    """
    Сборка разреженной CI-матрицы (все элементы степени <= 2, нули сохраняются).

    Args:
        params: Параметры пространства
        table: Интегралы
        mode: Учёт перестановочной чётности
        max_dimension: Ограничение на размерность (по умолчанию из настроек)
        max_workers: Число потоков для сборки строк

    Raises:
        CapExceededError: Размерность больше допустимой
        SlaterError: Таблица не покрывает пространство
    """
    limit = max_dimension if max_dimension is not None else settings.limits.max_ci_dimension
    total = params.dimension
    ensure_within_cap("max_ci_dimension", total, limit)
    if table.n_so < params.n_o:
        raise SlaterError(f"Таблица интегралов покрывает {table.n_so} орбиталей из {params.n_o}")

    workers = max(1, max_workers if max_workers is not None else settings.runtime.max_workers)
    configs = list(configurations(params))
    start_time = time.time()
    logger.info(
        "Сборка CI-матрицы",
        extra={"extra_data": {"n_o": params.n_o, "n_e": params.n_e, "dimension": total, "workers": workers}},
    )

    with get_metrics_collector().timer("build_ci_matrix"):
        if workers == 1 or total < 2 * workers:
            triplets = _build_rows(list(range(total)), configs, params, table, mode)
        else:
            chunk = -(-total // workers)
            chunks = [list(range(i, min(i + chunk, total))) for i in range(0, total, chunk)]
            with ThreadPoolExecutor(max_workers=workers) as executor:
                parts = list(
                    executor.map(lambda ranks: _build_rows(ranks, configs, params, table, mode), chunks)
                )
            triplets = [t for part in parts for t in part]
            triplets.sort(key=lambda t: (t.row, t.col))

    max_abs = max((abs(t.value) for t in triplets), default=0.0)
    logger.info(
        f"CI-матрица собрана за {time.time() - start_time:.3f}с",
        extra={"extra_data": {"triplets": len(triplets), "max_abs": max_abs}},
    )
    return SparseCiMatrix(params=params, table=table, triplets=triplets, max_abs=max_abs, mode=mode)


def polar_encode(value: float, h_max: float, n_bits: int) -> Tuple[int, int]:
    """
    Полярное кодирование элемента: (бит знака, код модуля на n_bits-1 битах).

    Модуль нормируется на h_max и округляется до ближайшего уровня.
    """
    if n_bits < 2:
        raise SlaterError(f"Для полярного кода нужно не менее 2 бит, получено {n_bits}")
    if h_max <= 0.0:
        return 0, 0
    levels = (1 << (n_bits - 1)) - 1
    code = int(round(abs(value) / h_max * levels))
    return (1 if value < 0 else 0), min(max(code, 0), levels)


def polar_decode(sign_bit: int, code: int, h_max: float, n_bits: int) -> float:
    """Обратное к polar_encode (с точностью до шага квантования)."""
    if n_bits < 2:
        raise SlaterError(f"Для полярного кода нужно не менее 2 бит, получено {n_bits}")
    if h_max <= 0.0:
        return 0.0
    levels = (1 << (n_bits - 1)) - 1
    magnitude = code / levels * h_max
    return -magnitude if sign_bit else magnitude


def quantization_error(matrix: SparseCiMatrix, n_bits: int) -> float:
    """Максимальная ошибка полярного квантования по элементам матрицы."""
    worst = 0.0
    for t in matrix.triplets:
        sign_bit, code = polar_encode(t.value, matrix.max_abs, n_bits)
        worst = max(worst, abs(polar_decode(sign_bit, code, matrix.max_abs, n_bits) - t.value))
    return worst
