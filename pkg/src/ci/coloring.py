"""Рёберная раскраска графа взаимодействий CI-матрицы.

Две схемы: метки пар (e_xy, e_yx), полученные подсчётом соседей внутри
класса возбуждения, и дескрипторы обмениваемых орбиталей. Каждый цвет
правильной раскраски задаёт одноразреженное слагаемое гамильтониана.
"""

import math
import time
from bisect import bisect_right
from collections import Counter, defaultdict
from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, List, NamedTuple, Optional, Tuple, Union

from src.ci.config_space import (
    Configuration,
    Rank,
    SpaceParams,
    configurations,
    n_excl,
    n_incl,
    neighbors,
    orbital_list,
    validate_configuration,
)
from src.ci.slater import SparseCiMatrix, excitation_degree
from src.core.config import settings
from src.core.logging import get_logger
from src.core.metrics import get_metrics_collector
from src.core.validation import ensure_within_cap
from src.models.reports import ColoringReport, ColorViolation, FormulaMismatch

logger = get_logger(__name__)


class ColoringError(Exception):
    """Исключение для ошибок раскраски."""
    pass


class ImproperColoringError(ColoringError):
    """Два ребра одного цвета у одного узла."""

    def __init__(self, node: Configuration, color: "EdgeColor", first: Configuration, second: Configuration):
        super().__init__(
            f"Неправильная раскраска: у узла {node} два ребра цвета {color.label}: {first} и {second}"
        )
        self.node = node
        self.color = color
        self.candidates = (first, second)


class ColoringScheme(str, Enum):
    """Схема раскраски."""
    DESCRIPTOR = "descriptor"
    PAIRLABEL = "pairlabel"
    PAIRLABEL_FORMULA = "pairlabel-formula"


@dataclass(frozen=True)
class Diagonal:
    """Цвет диагональных элементов."""

    @property
    def sort_key(self) -> Tuple[int, ...]:
        return (0,)

    @property
    def label(self) -> str:
        return "diagonal"


@dataclass(frozen=True)
class PairLabel:
    """Метка пары: класс возбуждения и номера соседей в обе стороны."""
    excitation_class: int
    e_low_high: int
    e_high_low: int

    def __post_init__(self):
        if self.excitation_class not in (1, 2):
            raise ColoringError(f"Класс возбуждения {self.excitation_class} (ожидается 1 или 2)")
        if self.e_low_high < 1 or self.e_high_low < 1:
            raise ColoringError(f"Метки должны быть положительными: ({self.e_low_high}, {self.e_high_low})")

    @property
    def sort_key(self) -> Tuple[int, ...]:
        return (self.excitation_class, 1, self.e_low_high, self.e_high_low)

    @property
    def label(self) -> str:
        return f"pair:{self.excitation_class}:{self.e_low_high},{self.e_high_low}"


@dataclass(frozen=True)
class SingleDescriptor:
    """Одиночный обмен: орбитали a < b, ровно одна из которых занята."""
    a: int
    b: int

    def __post_init__(self):
        if not 1 <= self.a < self.b:
            raise ColoringError(f"Недопустимый дескриптор ({self.a}, {self.b})")

    @property
    def mask(self) -> int:
        return (1 << (self.a - 1)) | (1 << (self.b - 1))

    @property
    def sort_key(self) -> Tuple[int, ...]:
        return (1, 0, self.a, self.b)

    @property
    def label(self) -> str:
        return f"single:{self.a},{self.b}"


@dataclass(frozen=True)
class DoubleDescriptor:
    """Двойной обмен: непересекающиеся пары, first < second."""
    first: Tuple[int, int]
    second: Tuple[int, int]

    def __post_init__(self):
        orbitals = self.first + self.second
        if (
            self.first[0] >= self.first[1]
            or self.second[0] >= self.second[1]
            or self.first >= self.second
            or len(set(orbitals)) != 4
            or min(orbitals) < 1
        ):
            raise ColoringError(f"Недопустимый дескриптор {self.first}|{self.second}")

    @property
    def masks(self) -> Tuple[int, int]:
        return (
            (1 << (self.first[0] - 1)) | (1 << (self.first[1] - 1)),
            (1 << (self.second[0] - 1)) | (1 << (self.second[1] - 1)),
        )

    @property
    def sort_key(self) -> Tuple[int, ...]:
        return (2, 0) + self.first + self.second

    @property
    def label(self) -> str:
        return f"double:{self.first[0]},{self.first[1]}|{self.second[0]},{self.second[1]}"


EdgeColor = Union[Diagonal, PairLabel, SingleDescriptor, DoubleDescriptor]


class FormulaLabels(NamedTuple):
    """Метки по замкнутым формулам и их сверка с подсчётом."""
    e_xy: int
    e_yx: int
    agrees: bool
    oracle: Tuple[int, int]


@dataclass
class OneSparseTerm:
    """Одноразреженное слагаемое H_m."""
    color: EdgeColor
    dimension: int
    fixed: List[Tuple[Rank, float]] = field(default_factory=list)
    pairs: List[Tuple[Rank, Rank, float]] = field(default_factory=list)

    @property
    def is_diagonal(self) -> bool:
        return isinstance(self.color, Diagonal)

    def validate(self) -> None:
        """
        Проверка одноразреженности: каждый ранг не более одного раза.

        Raises:
            ColoringError: Ранг встречается повторно или смешаны виды элементов
        """
        if self.dimension < 1:
            raise ColoringError(f"Недопустимая размерность слагаемого: {self.dimension}")
        if self.is_diagonal and self.pairs:
            raise ColoringError("Диагональное слагаемое содержит пары")
        if not self.is_diagonal and self.fixed:
            raise ColoringError(f"Слагаемое {self.color.label} содержит диагональные элементы")
        seen: Dict[Rank, Rank] = {}
        for q, _ in self.fixed:
            self._check_rank(q)
            if q in seen:
                raise ColoringError(f"Ранг {q} повторяется в диагональном слагаемом")
            seen[q] = q
        for q1, q2, _ in self.pairs:
            if q1 >= q2:
                raise ColoringError(f"Пара ({q1}, {q2}) не упорядочена")
            self._check_rank(q1)
            self._check_rank(q2)
            for q, partner in ((q1, q2), (q2, q1)):
                if q in seen:
                    raise ImproperColoringError(q, self.color, seen[q], partner)
                seen[q] = partner

    def _check_rank(self, q: Rank) -> None:
        if not 0 <= q < self.dimension:
            raise ColoringError(f"Ранг {q} вне размерности слагаемого {self.dimension}")


def _check_edge(x: Configuration, y: Configuration, params: SpaceParams) -> int:
    validate_configuration(x, params)
    validate_configuration(y, params)
    degree = excitation_degree(x, y)
    if degree not in (1, 2):
        raise ColoringError(f"Ребро ({x}, {y}) имеет степень возбуждения {degree}, ожидается 1 или 2")
    return degree


def pair_labels_oracle(x: Configuration, y: Configuration, params: SpaceParams) -> Tuple[int, int]:
    """
    Метки пары подсчётом соседей того же класса.

    e_xy - число соседей x, не превосходящих y; e_yx - число соседей y,
    не превосходящих x.

    Raises:
        ColoringError: x >= y или степень не 1 и не 2
    """
    degree = _check_edge(x, y, params)
    if x >= y:
        raise ColoringError(f"Ожидается x < y, получено ({x}, {y})")
    e_xy = bisect_right(neighbors(x, degree, params), y)
    e_yx = bisect_right(neighbors(y, degree, params), x)
    return e_xy, e_yx


def _formula_single(x: Configuration, d: int, u: int) -> Tuple[int, int]:
    r1 = sum(n_excl(x, i) for i in orbital_list(x) if i > u)
    e_xy = r1 + n_incl(x, u) * n_excl(x, u) + 1
    e_yx = r1 + n_excl(x, d) + 1
    return e_xy, e_yx


def _formula_double(x: Configuration, d_low: int, d_high: int, u_high: int) -> Tuple[int, int]:
    r2 = sum(n_incl(x, i) * math.comb(n_excl(x, i), 2) for i in orbital_list(x) if i > u_high)
    e_xy = r2 + math.comb(n_incl(x, u_high), 2) * math.comb(n_excl(x, u_high), 2) + 1
    e_yx = r2 + math.comb(n_excl(x, d_high), 2) + n_excl(x, d_low) + 1
    return e_xy, e_yx


def pair_labels_formula(x: Configuration, y: Configuration, params: SpaceParams) -> FormulaLabels:
    """
    Метки пары по замкнутым формулам и флаг согласия с подсчётом.

    Raises:
        ColoringError: Как у pair_labels_oracle
    """
    oracle = pair_labels_oracle(x, y, params)
    removed = orbital_list(x & ~y)
    added = orbital_list(y & ~x)
    if len(removed) == 1:
        e_xy, e_yx = _formula_single(x, removed[0], added[0])
    else:
        e_xy, e_yx = _formula_double(x, removed[0], removed[1], added[1])
    return FormulaLabels(e_xy, e_yx, (e_xy, e_yx) == oracle, oracle)


def pair_label_color(x: Configuration, y: Configuration, params: SpaceParams) -> PairLabel:
    """Цвет ребра по меткам подсчёта (порядок концов не важен)."""
    low, high = (x, y) if x < y else (y, x)
    degree = _check_edge(low, high, params)
    e_xy, e_yx = pair_labels_oracle(low, high, params)
    return PairLabel(degree, e_xy, e_yx)


def descriptor_color(x: Configuration, y: Configuration, params: Optional[SpaceParams] = None) -> EdgeColor:
    """Дескриптор обмена: симметричен по x и y."""
    if params is not None:
        degree = _check_edge(x, y, params)
    else:
        degree = excitation_degree(x, y)
    if degree == 1:
        a, b = sorted(orbital_list(x ^ y))
        return SingleDescriptor(a, b)
    if degree == 2:
        first = tuple(orbital_list(x & ~y))
        second = tuple(orbital_list(y & ~x))
        if second < first:
            first, second = second, first
        return DoubleDescriptor(first, second)
    raise ColoringError(f"Ребро ({x}, {y}) имеет степень возбуждения {degree}, ожидается 1 или 2")


def edge_color(x: Configuration, y: Configuration, scheme: ColoringScheme, params: SpaceParams) -> EdgeColor:
    """Цвет ребра (x, y) в выбранной схеме."""
    if x == y:
        return Diagonal()
    if scheme == ColoringScheme.DESCRIPTOR:
        return descriptor_color(x, y, params)
    if scheme == ColoringScheme.PAIRLABEL:
        return pair_label_color(x, y, params)
    if scheme == ColoringScheme.PAIRLABEL_FORMULA:
        low, high = (x, y) if x < y else (y, x)
        labels = pair_labels_formula(low, high, params)
        return PairLabel(excitation_degree(low, high), labels.e_xy, labels.e_yx)
    raise ColoringError(f"Неизвестная схема раскраски: {scheme}")


def col_oracle(x: Configuration, color: EdgeColor, params: SpaceParams) -> Optional[Configuration]:
    """
    Единственный y, для которого ребро (x, y) имеет цвет color.

    Returns:
        Конфигурация y, x для диагонали или None

    Raises:
        ImproperColoringError: Найдено два кандидата
    """
    validate_configuration(x, params)
    if isinstance(color, Diagonal):
        return x

    if isinstance(color, SingleDescriptor):
        if color.b > params.n_o:
            return None
        occupied = x & color.mask
        if occupied and occupied != color.mask:
            return x ^ color.mask
        return None

    if isinstance(color, DoubleDescriptor):
        if max(color.first + color.second) > params.n_o:
            return None
        mask_a, mask_b = color.masks
        if (x & mask_a == mask_a and not x & mask_b) or (x & mask_b == mask_b and not x & mask_a):
            return x ^ mask_a ^ mask_b
        return None

    if isinstance(color, PairLabel):
        own = neighbors(x, color.excitation_class, params)
        candidates: List[Configuration] = []
        if color.e_low_high <= len(own):
            up = own[color.e_low_high - 1]
            if up > x and bisect_right(neighbors(up, color.excitation_class, params), x) == color.e_high_low:
                candidates.append(up)
        if color.e_high_low <= len(own):
            down = own[color.e_high_low - 1]
            if down < x and bisect_right(neighbors(down, color.excitation_class, params), x) == color.e_low_high:
                candidates.append(down)
        if len(candidates) > 1:
            raise ImproperColoringError(x, color, candidates[0], candidates[1])
        return candidates[0] if candidates else None

    raise ColoringError(f"Неизвестный цвет: {color!r}")


def descriptor_color_count(params: SpaceParams) -> int:
    """Число цветов схемы дескрипторов с непустым носителем (с диагональю)."""
    holes = params.n_holes
    singles = math.comb(params.n_o, 2) if params.n_e >= 1 and holes >= 1 else 0
    doubles = 3 * math.comb(params.n_o, 4) if params.n_e >= 2 and holes >= 2 else 0
    return singles + doubles + 1


def verify_properness(
    params: SpaceParams,
    scheme: ColoringScheme,
    max_nodes: Optional[int] = None,
) -> ColoringReport:
    """
    Полная проверка: ни у одного узла нет двух рёбер одного цвета.

    Для схем меток пар дополнительно сверяет замкнутые формулы с подсчётом.

    Raises:
        CapExceededError: Размерность больше допустимой для перебора
    """
    scheme = ColoringScheme(scheme)
    limit = max_nodes if max_nodes is not None else settings.limits.enumeration_cap
    ensure_within_cap("enumeration_cap", params.dimension, limit)

    start_time = time.time()
    logger.info(
        "Проверка раскраски",
        extra={"extra_data": {"scheme": scheme.value, "n_o": params.n_o, "n_e": params.n_e}},
    )

    violations: List[Tuple[Configuration, Tuple[int, ...], ColorViolation]] = []
    all_colors = {Diagonal()}
    incident: Counter = Counter()
    edges = 0

    with get_metrics_collector().timer("verify_properness"):
        for x in configurations(params):
            seen: Dict[EdgeColor, Configuration] = {}
            reported = set()
            for degree in (1, 2):
                for y in neighbors(x, degree, params):
                    if y > x:
                        edges += 1
                    color = edge_color(x, y, scheme, params)
                    if color in seen:
                        if color not in reported:
                            reported.add(color)
                            violations.append((x, color.sort_key, ColorViolation(
                                node=x, color=color.label, neighbor_1=seen[color], neighbor_2=y,
                            )))
                        continue
                    seen[color] = y
            all_colors.update(seen)
            incident[len(seen) + 1] += 1

        mismatches: List[FormulaMismatch] = []
        checked = 0
        if scheme in (ColoringScheme.PAIRLABEL, ColoringScheme.PAIRLABEL_FORMULA):
            mismatches, checked = _formula_audit(params)

    violations.sort(key=lambda item: (item[0], item[1]))
    report = ColoringReport(
        scheme=scheme.value,
        n_o=params.n_o,
        n_e=params.n_e,
        edges=edges,
        total_colors=len(all_colors),
        incident_distribution=dict(sorted(incident.items())),
        violations=[item[2] for item in violations],
        formula_mismatches=mismatches,
        formula_checked=checked,
    )
    if scheme == ColoringScheme.PAIRLABEL_FORMULA:
        report.normative_proper = verify_properness(params, ColoringScheme.PAIRLABEL, limit).proper
    else:
        report.normative_proper = report.proper

    logger.info(
        f"Проверка раскраски завершена за {time.time() - start_time:.3f}с",
        extra={"extra_data": {
            "scheme": scheme.value,
            "edges": edges,
            "violations": len(report.violations),
            "formula_mismatches": len(mismatches),
        }},
    )
    return report


def _formula_audit(params: SpaceParams) -> Tuple[List[FormulaMismatch], int]:
    """Сверка формул меток с подсчётом на каждом ребре x < y."""
    mismatches: List[FormulaMismatch] = []
    checked = 0
    for x in configurations(params):
        for degree in (1, 2):
            for y in neighbors(x, degree, params):
                if y <= x:
                    continue
                checked += 1
                labels = pair_labels_formula(x, y, params)
                if not labels.agrees:
                    mismatches.append(FormulaMismatch(
                        x=x, y=y, excitation_class=degree,
                        formula=(labels.e_xy, labels.e_yx), oracle=labels.oracle,
                    ))
    return mismatches, checked


def mismatch_summary(report: ColoringReport, limit: int = 10) -> Dict[str, object]:
    """Число расхождений формул по классам и первые расхождения."""
    by_class = Counter(mismatch.excitation_class for mismatch in report.formula_mismatches)
    return {
        "checked": report.formula_checked,
        "total": len(report.formula_mismatches),
        "class_1": by_class.get(1, 0),
        "class_2": by_class.get(2, 0),
        "first": report.formula_mismatches[:limit],
    }


def decompose(matrix: SparseCiMatrix, scheme: ColoringScheme) -> List[OneSparseTerm]:
    """
    Разложение H на одноразреженные слагаемые по цветам рёбер.

    Returns:
        Диагональное слагаемое первым, затем цвета в каноническом порядке

    Raises:
        ImproperColoringError: Цветовой класс не одноразреженный
    """
    scheme = ColoringScheme(scheme)
    params = matrix.params
    configs = list(configurations(params))
    terms: Dict[EdgeColor, OneSparseTerm] = {}
    diagonal = OneSparseTerm(color=Diagonal(), dimension=matrix.dimension)

    with get_metrics_collector().timer("decompose"):
        for element in matrix.triplets:
            if element.row == element.col:
                diagonal.fixed.append((element.row, element.value))
                continue
            color = edge_color(configs[element.row], configs[element.col], scheme, params)
            term = terms.get(color)
            if term is None:
                term = terms[color] = OneSparseTerm(color=color, dimension=matrix.dimension)
            term.pairs.append((element.row, element.col, element.value))

        result = [diagonal] + [terms[color] for color in sorted(terms, key=lambda c: c.sort_key)]
        for term in result:
            term.validate()

    logger.info(
        "Разложение на одноразреженные слагаемые",
        extra={"extra_data": {"scheme": scheme.value, "terms": len(result)}},
    )
    return result


def reconstruct(terms: List[OneSparseTerm], dimension: int) -> Dict[Tuple[Rank, Rank], float]:
    """Сумма слагаемых как словарь (row, col) -> value для row <= col."""
    total: Dict[Tuple[Rank, Rank], float] = defaultdict(float)
    for term in terms:
        for q, value in term.fixed:
            total[(q, q)] += value
        for q1, q2, value in term.pairs:
            total[(q1, q2)] += value
    for (row, col) in total:
        if not 0 <= row <= col < dimension:
            raise ColoringError(f"Элемент ({row}, {col}) вне матрицы размерности {dimension}")
    return dict(total)
