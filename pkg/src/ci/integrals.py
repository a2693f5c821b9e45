"""Одно- и двухэлектронные интегралы по спин-орбиталям.

Внутренняя форма - физическая нотация <pq|rs>. Хранение разреженное:
каждое значение лежит под каноническим представителем класса 8-кратной
симметрии вещественных орбиталей, поэтому симметричные элементы совпадают
побитово. Отсутствующие интегралы равны нулю.
"""

import math
from enum import Enum
from types import MappingProxyType
from typing import Dict, Iterator, List, Literal, Mapping, Optional, Tuple

import numpy as np

from src.core.config import settings
from src.core.logging import get_logger

logger = get_logger(__name__)

OneBodyKey = Tuple[int, int]
TwoBodyKey = Tuple[int, int, int, int]


class IntegralError(Exception):
    """Исключение для ошибок таблицы интегралов."""
    pass


class Spin(str, Enum):
    """Спиновая функция."""
    ALPHA = "alpha"
    BETA = "beta"


class SpinOrbitalMap:
    """Чередующаяся нумерация: пространственная i -> 2i-1 (alpha), 2i (beta)."""

    def __init__(self, n_spatial: int):
        if n_spatial < 1:
            raise IntegralError(f"Число пространственных орбиталей должно быть положительным: {n_spatial}")
        self.n_spatial = n_spatial

    @property
    def n_spin_orbitals(self) -> int:
        return 2 * self.n_spatial

    def to_spin_orbital(self, spatial: int, spin: Spin) -> int:
        """Номер спин-орбитали для пространственной орбитали и спина."""
        if not 1 <= spatial <= self.n_spatial:
            raise IntegralError(f"Пространственная орбиталь {spatial} вне диапазона [1, {self.n_spatial}]")
        return 2 * spatial - 1 if spin == Spin.ALPHA else 2 * spatial

    def from_spin_orbital(self, p: int) -> Tuple[int, Spin]:
        """Пространственная орбиталь и спин для спин-орбитали p."""
        if not 1 <= p <= self.n_spin_orbitals:
            raise IntegralError(f"Спин-орбиталь {p} вне диапазона [1, {self.n_spin_orbitals}]")
        return (p + 1) // 2, spin_of(p)


def spin_of(p: int) -> Spin:
    """Спин спин-орбитали при чередующейся нумерации."""
    return Spin.ALPHA if p % 2 == 1 else Spin.BETA


def canonical_one_body(p: int, q: int) -> OneBodyKey:
    """Канонический ключ h_pq = h_qp."""
    return (p, q) if p <= q else (q, p)


def canonical_two_body(p: int, q: int, r: int, s: int) -> TwoBodyKey:
    """
    Канонический ключ для <pq|rs>.

    <pq|rs> = (pr|qs) в химической нотации; 8 перестановок (ij|kl)
    сводятся к упорядоченным парам, упорядоченным между собой.
    """
    first = (p, r) if p <= r else (r, p)
    second = (q, s) if q <= s else (s, q)
    if second < first:
        first, second = second, first
    return first + second


def physicist_partners(p: int, q: int, r: int, s: int) -> List[TwoBodyKey]:
    """Восемь симметрично эквивалентных индексов <pq|rs>."""
    return [
        (p, q, r, s), (q, p, s, r), (r, s, p, q), (s, r, q, p),
        (r, q, p, s), (p, s, r, q), (q, r, s, p), (s, p, q, r),
    ]


class IntegralTable:
    """Неизменяемая таблица интегралов по n_so спин-орбиталям (в хартри)."""

    def __init__(
        self,
        n_so: int,
        one_body: Mapping[OneBodyKey, float],
        two_body: Mapping[TwoBodyKey, float],
        core_energy: float = 0.0,
        n_electrons: Optional[int] = None,
        ms2: Optional[int] = None,
    ):
        self.n_so = n_so
        self.core_energy = float(core_energy)
        self.n_electrons = n_electrons
        self.ms2 = ms2
        self._one = MappingProxyType(dict(one_body))
        self._two = MappingProxyType(dict(two_body))

    def __repr__(self) -> str:
        return (
            f"IntegralTable(n_so={self.n_so}, one_body={len(self._one)}, "
            f"two_body={len(self._two)}, core_energy={self.core_energy})"
        )

    def _check_index(self, *indices: int) -> None:
        for index in indices:
            if not 1 <= index <= self.n_so:
                raise IntegralError(f"Спин-орбиталь {index} вне диапазона [1, {self.n_so}]")

    def one_electron(self, p: int, q: int) -> float:
        """h_pq с учётом симметрии и спинового отбора."""
        self._check_index(p, q)
        if spin_of(p) != spin_of(q):
            return 0.0
        return self._one.get(canonical_one_body(p, q), 0.0)

    def two_electron(self, p: int, q: int, r: int, s: int) -> float:
        """<pq|rs> в физической нотации."""
        self._check_index(p, q, r, s)
        if spin_of(p) != spin_of(r) or spin_of(q) != spin_of(s):
            return 0.0
        return self._two.get(canonical_two_body(p, q, r, s), 0.0)

    def antisymmetrized(self, p: int, q: int, r: int, s: int) -> float:
        """<pq||rs> = <pq|rs> - <pq|sr>."""
        return self.two_electron(p, q, r, s) - self.two_electron(p, q, s, r)

    def one_body_items(self) -> Iterator[Tuple[OneBodyKey, float]]:
        """Хранимые одноэлектронные элементы."""
        return iter(sorted(self._one.items()))

    def two_body_items(self) -> Iterator[Tuple[TwoBodyKey, float]]:
        """Хранимые двухэлектронные элементы (ключи в химическом порядке (pr|qs))."""
        return iter(sorted(self._two.items()))

    def audit(self) -> List[str]:
        """
        Проверка инвариантов таблицы по всем хранимым элементам.

        Returns:
            Список найденных нарушений (пустой, если таблица корректна)
        """
        problems: List[str] = []
        for (p, q), value in self._one.items():
            if self.one_electron(p, q) != self.one_electron(q, p):
                problems.append(f"h[{p},{q}] != h[{q},{p}]")
            if value != 0.0 and spin_of(p) != spin_of(q):
                problems.append(f"h[{p},{q}] связывает разные спины")
        for (p, r, q, s), value in self._two.items():
            if value != 0.0 and (spin_of(p) != spin_of(r) or spin_of(q) != spin_of(s)):
                problems.append(f"<{p}{q}|{r}{s}> связывает разные спины")
                continue
            reference = self.two_electron(p, q, r, s)
            for partner in physicist_partners(p, q, r, s):
                if self.two_electron(*partner) != reference:
                    problems.append(f"<{p}{q}|{r}{s}> != <{partner}>")
        return problems


class IntegralTableBuilder:
    """Накопитель интегралов с проверкой согласованности повторов."""

    def __init__(self, n_so: int, tolerance: Optional[float] = None):
        if n_so < 1:
            raise IntegralError(f"Число спин-орбиталей должно быть положительным: {n_so}")
        self.n_so = n_so
        self.tolerance = settings.numerics.duplicate_tolerance if tolerance is None else tolerance
        self._one: Dict[OneBodyKey, float] = {}
        self._two: Dict[TwoBodyKey, float] = {}
        self._core: Optional[float] = None

    def _check_index(self, *indices: int) -> None:
        for index in indices:
            if not 1 <= index <= self.n_so:
                raise IntegralError(f"Спин-орбиталь {index} вне диапазона [1, {self.n_so}]")

    @staticmethod
    def _check_value(value: float) -> None:
        if not math.isfinite(value):
            raise IntegralError(f"Значение интеграла не конечно: {value!r}")

    def _store(self, storage: Dict, key: Tuple[int, ...], value: float) -> None:
        self._check_value(value)
        previous = storage.get(key)
        if previous is not None:
            if abs(previous - value) > self.tolerance:
                raise IntegralError(
                    f"Противоречивые повторы для {key}: {previous!r} и {value!r}"
                )
            return
        storage[key] = float(value)

    def set_one_body(self, p: int, q: int, value: float) -> None:
        """Записать h_pq (и h_qp)."""
        self._check_index(p, q)
        if spin_of(p) != spin_of(q):
            if value != 0.0:
                raise IntegralError(f"h[{p},{q}] связывает разные спины")
            return
        self._store(self._one, canonical_one_body(p, q), value)

    def set_two_body(self, p: int, q: int, r: int, s: int, value: float) -> None:
        """Записать <pq|rs> вместе со всеми симметричными партнёрами."""
        self._check_index(p, q, r, s)
        if spin_of(p) != spin_of(r) or spin_of(q) != spin_of(s):
            if value != 0.0:
                raise IntegralError(f"<{p}{q}|{r}{s}> связывает разные спины")
            return
        self._store(self._two, canonical_two_body(p, q, r, s), value)

    def set_core_energy(self, value: float) -> None:
        """Записать энергию остова."""
        self._check_value(value)
        if self._core is not None and abs(self._core - value) > self.tolerance:
            raise IntegralError(f"Противоречивые значения энергии остова: {self._core!r} и {value!r}")
        if self._core is None:
            self._core = float(value)

    def build(self, n_electrons: Optional[int] = None, ms2: Optional[int] = None) -> IntegralTable:
        """Создать неизменяемую таблицу."""
        return IntegralTable(
            n_so=self.n_so,
            one_body=self._one,
            two_body=self._two,
            core_energy=self._core or 0.0,
            n_electrons=n_electrons,
            ms2=ms2,
        )


def expand_spatial(
    h_spatial: np.ndarray,
    eri_chemist: np.ndarray,
    core_energy: float = 0.0,
    n_electrons: Optional[int] = None,
) -> IntegralTable:
    """
    Таблица по спин-орбиталям из интегралов по пространственным орбиталям.

    Args:
        h_spatial: Симметричная матрица h_ij (n x n)
        eri_chemist: Массив (ij|kl) в химической нотации (n x n x n x n)
        core_energy: Энергия остова
        n_electrons: Число электронов (если известно)
    """
    n = h_spatial.shape[0]
    mapping = SpinOrbitalMap(n)
    builder = IntegralTableBuilder(mapping.n_spin_orbitals)
    spins = (Spin.ALPHA, Spin.BETA)
    for i in range(n):
        for j in range(i, n):
            value = float(h_spatial[i, j])
            if value == 0.0:
                continue
            for spin in spins:
                builder.set_one_body(
                    mapping.to_spin_orbital(i + 1, spin), mapping.to_spin_orbital(j + 1, spin), value
                )
    for i, j, k, l in zip(*(index.tolist() for index in np.nonzero(eri_chemist))):
        if (i, j) > (j, i) or (k, l) > (l, k) or (i, j) > (k, l):
            continue
        value = float(eri_chemist[i, j, k, l])
        for spin_1 in spins:
            for spin_2 in spins:
                p = mapping.to_spin_orbital(i + 1, spin_1)
                r = mapping.to_spin_orbital(j + 1, spin_1)
                q = mapping.to_spin_orbital(k + 1, spin_2)
                s = mapping.to_spin_orbital(l + 1, spin_2)
                # (ij|kl) = <ik|jl>
                builder.set_two_body(p, q, r, s, value)
    builder.set_core_energy(core_energy)
    return builder.build(n_electrons=n_electrons)


def synthetic_table(
    kind: Literal["diagonal-one-body", "random-symmetric"],
    seed: int,
    n_so: int,
) -> IntegralTable:
    """
    Детерминированные тестовые таблицы.

    diagonal-one-body: h_pp = p, остальное ноль.
    random-symmetric: равномерные значения в [-1, 1] по пространственным
    орбиталям, симметризованные по всем перестановкам и размноженные по спинам.

    Raises:
        IntegralError: Нечётное n_so для random-symmetric или неизвестный вид таблицы
    """
    if n_so < 1:
        raise IntegralError(f"Число спин-орбиталей должно быть положительным: {n_so}")

    if kind == "diagonal-one-body":
        builder = IntegralTableBuilder(n_so)
        for p in range(1, n_so + 1):
            builder.set_one_body(p, p, float(p))
        return builder.build()

    if kind == "random-symmetric":
        if n_so % 2 != 0:
            raise IntegralError(f"Число спин-орбиталей должно быть чётным: {n_so}")
        n = n_so // 2
        rng = np.random.default_rng(seed)
        h = rng.uniform(-1.0, 1.0, size=(n, n))
        h = 0.5 * (h + h.T)
        eri = rng.uniform(-1.0, 1.0, size=(n, n, n, n))
        eri = (
            eri
            + eri.transpose(1, 0, 2, 3)
            + eri.transpose(0, 1, 3, 2)
            + eri.transpose(1, 0, 3, 2)
            + eri.transpose(2, 3, 0, 1)
            + eri.transpose(3, 2, 0, 1)
            + eri.transpose(2, 3, 1, 0)
            + eri.transpose(3, 2, 1, 0)
        ) / 8.0
        core = float(rng.uniform(-1.0, 1.0))
        logger.debug(
            "Создана случайная таблица интегралов",
            extra={"extra_data": {"seed": seed, "n_so": n_so}},
        )
        return expand_spatial(h, eri, core_energy=core)

    raise IntegralError(f"Неизвестный вид синтетической таблицы: {kind}")
