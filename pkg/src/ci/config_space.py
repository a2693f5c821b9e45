"""Пространство конфигураций с фиксированным числом электронов.

Конфигурация (детерминант Слэтера) хранится битовой маской: бит (i-1)
установлен, если занята спин-орбиталь i. Ранг конфигурации - её номер
среди всех масок с n_e единицами в порядке возрастания. Ранжирование
выполняется комбинаторной системой счисления, без перебора.
"""

import math
from dataclasses import dataclass
from itertools import combinations
from typing import Iterable, Iterator, List, NamedTuple, Optional, Tuple

from src.core.constants import MAX_BITMASK_ORBITALS, RANK_WIDTH_BITS
from src.core.utils import ceil_log2

# Конфигурация - битовая маска занятых орбиталей, ранг - индекс в [0, D)
Configuration = int
Rank = int


class ConfigSpaceError(Exception):
    """Исключение для ошибок пространства конфигураций."""
    pass


@dataclass(frozen=True)
class SpaceParams:
    """Параметры пространства: n_o спин-орбиталей, n_e электронов."""
    n_o: int
    n_e: int

    def __post_init__(self):
        if not isinstance(self.n_o, int) or not isinstance(self.n_e, int):
            raise ConfigSpaceError("n_o и n_e должны быть целыми")
        if not 1 <= self.n_o <= MAX_BITMASK_ORBITALS:
            raise ConfigSpaceError(
                f"Число орбиталей n_o={self.n_o} вне диапазона [1, {MAX_BITMASK_ORBITALS}]"
            )
        if not 0 <= self.n_e <= self.n_o:
            raise ConfigSpaceError(f"Число электронов n_e={self.n_e} вне диапазона [0, {self.n_o}]")

    @property
    def dimension(self) -> int:
        return dimension(self)

    @property
    def n_holes(self) -> int:
        """Число незанятых орбиталей."""
        return self.n_o - self.n_e


class OrbitalCounts(NamedTuple):
    """Число занятых и свободных орбиталей строго ниже опорной."""
    n_incl: int
    n_excl: int


def encode(orbitals: Iterable[int], params: Optional[SpaceParams] = None) -> Configuration:
    """
    Кодирует набор занятых орбиталей в битовую маску.

    Args:
        orbitals: Номера орбиталей (с единицы)
        params: Параметры пространства для проверки диапазона и числа электронов

    Returns:
        Битовая маска конфигурации

    Raises:
        ConfigSpaceError: Орбиталь вне диапазона, повтор или неверное число электронов
    """
    orbital_list_ = list(orbitals)
    upper = params.n_o if params is not None else MAX_BITMASK_ORBITALS
    x = 0
    for orbital in orbital_list_:
        if not isinstance(orbital, int) or not 1 <= orbital <= upper:
            raise ConfigSpaceError(f"Орбиталь {orbital!r} вне диапазона [1, {upper}]")
        bit = 1 << (orbital - 1)
        if x & bit:
            raise ConfigSpaceError(f"Орбиталь {orbital} указана дважды")
        x |= bit
    if params is not None and len(orbital_list_) != params.n_e:
        raise ConfigSpaceError(
            f"Ожидалось {params.n_e} орбиталей, получено {len(orbital_list_)}"
        )
    return x


def orbital_list(x: Configuration) -> List[int]:
    """Возрастающий список занятых орбиталей (с единицы)."""
    return [i + 1 for i in range(x.bit_length()) if (x >> i) & 1]


def dimension(params: SpaceParams) -> int:
    """
    Размерность пространства D(n_o, n_e) = C(n_o, n_e).

    Raises:
        ConfigSpaceError: Если размерность не помещается в ширину ранга
    """
    value = math.comb(params.n_o, params.n_e)
    if value >= 2 ** (RANK_WIDTH_BITS - 1):
        raise ConfigSpaceError(f"Размерность C({params.n_o},{params.n_e}) переполняет ранг")
    return value


def validate_configuration(x: Configuration, params: SpaceParams) -> None:
    """
    Проверка конфигурации для пространства.

    Raises:
        ConfigSpaceError: Неверное число электронов или орбиталь выше n_o
    """
    if not isinstance(x, int) or x < 0:
        raise ConfigSpaceError(f"Недопустимая конфигурация: {x!r}")
    if x >> params.n_o:
        raise ConfigSpaceError(f"Конфигурация {x} занимает орбитали выше n_o={params.n_o}")
    if x.bit_count() != params.n_e:
        raise ConfigSpaceError(
            f"Конфигурация {x} содержит {x.bit_count()} электронов вместо {params.n_e}"
        )


def rank(x: Configuration, params: SpaceParams) -> Rank:
    """
    Ранг конфигурации: сумма C(c_k, k) по занятым позициям c_1 < ... < c_n.

    Returns:
        Индекс от нуля в порядке возрастания битовых масок
    """
    validate_configuration(x, params)
    result = 0
    k = 0
    remaining = x
    while remaining:
        low = remaining & -remaining
        k += 1
        result += math.comb(low.bit_length() - 1, k)
        remaining ^= low
    return result


def unrank(q: Rank, params: SpaceParams) -> Configuration:
    """
    Конфигурация с рангом q (обратное к rank).

    Raises:
        ConfigSpaceError: Ранг вне диапазона [0, D)
    """
    total = dimension(params)
    if not isinstance(q, int) or not 0 <= q < total:
        raise ConfigSpaceError(f"Ранг {q!r} вне диапазона [0, {total})")
    x = 0
    remaining = q
    position = params.n_o - 1
    for k in range(params.n_e, 0, -1):
        while math.comb(position, k) > remaining:
            position -= 1
        x |= 1 << position
        remaining -= math.comb(position, k)
        position -= 1
    return x


def configurations(params: SpaceParams) -> Iterator[Configuration]:
    """Все конфигурации пространства в порядке возрастания (перебор Госпера)."""
    if params.n_e == 0:
        yield 0
        return
    x = (1 << params.n_e) - 1
    limit = 1 << params.n_o
    while x < limit:
        yield x
        lowest = x & -x
        ripple = x + lowest
        x = (((ripple ^ x) >> 2) // lowest) | ripple


def n_incl(x: Configuration, i: int) -> int:
    """Число занятых орбиталей строго ниже орбитали i."""
    if i < 1:
        raise ConfigSpaceError(f"Номер орбитали {i} должен быть не меньше 1")
    return (x & ((1 << (i - 1)) - 1)).bit_count()


def n_excl(x: Configuration, i: int) -> int:
    """Число свободных орбиталей строго ниже орбитали i."""
    return (i - 1) - n_incl(x, i)


def orbital_counts(x: Configuration, i: int) -> OrbitalCounts:
    """Пара (n_incl, n_excl) для орбитали i."""
    below = n_incl(x, i)
    return OrbitalCounts(n_incl=below, n_excl=(i - 1) - below)


def _split_orbitals(x: Configuration, params: SpaceParams) -> Tuple[List[int], List[int]]:
    """Позиции занятых и свободных битов (с нуля)."""
    occupied = [i for i in range(params.n_o) if (x >> i) & 1]
    empty = [i for i in range(params.n_o) if not (x >> i) & 1]
    return occupied, empty


def neighbors(x: Configuration, degree: int, params: SpaceParams) -> List[Configuration]:
    """
    Конфигурации, отличающиеся от x ровно в degree занятых орбиталях.

    Args:
        x: Исходная конфигурация
        degree: Степень возбуждения (1 или 2)
        params: Параметры пространства

    Returns:
        Строго возрастающий список битовых масок
    """
    validate_configuration(x, params)
    occupied, empty = _split_orbitals(x, params)
    if degree == 1:
        result = [x ^ (1 << d) ^ (1 << u) for d in occupied for u in empty]
    elif degree == 2:
        result = [
            x ^ (1 << d1) ^ (1 << d2) ^ (1 << u1) ^ (1 << u2)
            for d1, d2 in combinations(occupied, 2)
            for u1, u2 in combinations(empty, 2)
        ]
    else:
        raise ConfigSpaceError(f"Степень возбуждения {degree} не поддерживается (1 или 2)")
    result.sort()
    return result


def neighbor_count(params: SpaceParams, degree: int) -> int:
    """Число соседей степени degree у любой конфигурации."""
    holes = params.n_o - params.n_e
    if degree == 1:
        return params.n_e * holes
    if degree == 2:
        return math.comb(params.n_e, 2) * math.comb(holes, 2)
    raise ConfigSpaceError(f"Степень возбуждения {degree} не поддерживается (1 или 2)")


def sparsity(params: SpaceParams) -> int:
    """Число структурно ненулевых элементов в строке CI-матрицы."""
    n_o, n_e = params.n_o, params.n_e
    holes = n_o - n_e
    return (n_e * (n_e - 1) * holes * (holes - 1)) // 4 + n_e * holes + 1


def register_widths(params: SpaceParams) -> Tuple[int, int]:
    """
    Ширина регистров для хранения конфигурации.

    Returns:
        (число бит в представлении чисел заполнения, число бит для ранга)
    """
    return params.n_o, ceil_log2(dimension(params))


def color_register_bits(params: SpaceParams) -> int:
    """Число бит для индексации d цветов, инцидентных одному узлу."""
    return ceil_log2(sparsity(params))
