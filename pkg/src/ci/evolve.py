"""Эволюция exp(-iHt) произведениями экспонент одноразреженных слагаемых.

Порядок 1 - формула Ли, порядок 2 - симметричная формула Странга,
порядок 2k - рекурсия Судзуки над формулой Странга.
"""

import math
import time
from dataclasses import dataclass, field
from datetime import datetime
from typing import Callable, List, NamedTuple, Optional, Sequence, Tuple, Union

import numpy as np
from scipy import linalg, sparse

from src.ci.coloring import OneSparseTerm
from src.ci.config_space import SpaceParams, rank, validate_configuration
from src.ci.slater import SparseCiMatrix
from src.core.config import settings
from src.core.constants import UNITARITY_TOLERANCE
from src.core.logging import get_logger
from src.core.metrics import get_metrics_collector
from src.core.validation import NumericalCheckError, ensure_within_cap
from src.models.reports import EvolutionStatus, EvolutionSummary

logger = get_logger(__name__)


class EvolutionError(Exception):
    """Исключение для ошибок эволюции."""
    pass


@dataclass
class StateVector:
    """Амплитуды по рангам конфигураций."""
    amplitudes: np.ndarray

    def __post_init__(self):
        self.amplitudes = np.asarray(self.amplitudes, dtype=complex)
        if self.amplitudes.ndim != 1:
            raise EvolutionError("Вектор состояния должен быть одномерным")

    @property
    def dim(self) -> int:
        return self.amplitudes.shape[0]

    @classmethod
    def basis(cls, dim: int, q: int) -> "StateVector":
        """Базисное состояние e_q."""
        if not 0 <= q < dim:
            raise EvolutionError(f"Ранг {q} вне диапазона [0, {dim})")
        amplitudes = np.zeros(dim, dtype=complex)
        amplitudes[q] = 1.0
        return cls(amplitudes)

    @classmethod
    def from_configuration(cls, x: int, params: SpaceParams) -> "StateVector":
        """Детерминант x как вектор состояния."""
        validate_configuration(x, params)
        return cls.basis(params.dimension, rank(x, params))

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def copy(self) -> "StateVector":
        return StateVector(self.amplitudes.copy())


@dataclass
class TwoByTwoUnitary:
    """Блок 2x2, действующий на пару амплитуд."""
    matrix: np.ndarray

    def __post_init__(self):
        self.matrix = np.asarray(self.matrix, dtype=complex)
        if self.matrix.shape != (2, 2):
            raise EvolutionError(f"Ожидалась матрица 2x2, получено {self.matrix.shape}")

    def deviation_from_unitarity(self) -> float:
        """max |U+U - I|."""
        return float(np.max(np.abs(self.matrix.conj().T @ self.matrix - np.eye(2))))

    def is_unitary(self, tolerance: float = UNITARITY_TOLERANCE) -> bool:
        return self.deviation_from_unitarity() < tolerance

    def __matmul__(self, other: "TwoByTwoUnitary") -> "TwoByTwoUnitary":
        return TwoByTwoUnitary(self.matrix @ other.matrix)


class _CompiledTerm(NamedTuple):
    fixed_ranks: np.ndarray
    fixed_values: np.ndarray
    first: np.ndarray
    second: np.ndarray
    magnitudes: np.ndarray
    signs: np.ndarray
    max_rank: int
    dimension: int


def compile_term(term: OneSparseTerm) -> _CompiledTerm:
    """Массивы рангов и полярных пар (знак, модуль) для слагаемого."""
    fixed_ranks = np.array([q for q, _ in term.fixed], dtype=np.int64)
    fixed_values = np.array([v for _, v in term.fixed], dtype=float)
    first = np.array([q1 for q1, _, _ in term.pairs], dtype=np.int64)
    second = np.array([q2 for _, q2, _ in term.pairs], dtype=np.int64)
    values = np.array([v for _, _, v in term.pairs], dtype=float)
    ranks = [int(fixed_ranks.max()) if fixed_ranks.size else -1, int(second.max()) if second.size else -1]
    return _CompiledTerm(
        fixed_ranks=fixed_ranks,
        fixed_values=fixed_values,
        first=first,
        second=second,
        magnitudes=np.abs(values),
        signs=np.where(values < 0, -1.0, 1.0),
        max_rank=max(ranks),
        dimension=term.dimension,
    )


def _apply_compiled(term: _CompiledTerm, dt: float, amplitudes: np.ndarray) -> None:
    """Применение exp(-i H_m dt) на месте."""
    if term.dimension != amplitudes.shape[0]:
        raise EvolutionError(
            f"Слагаемое построено для размерности {term.dimension}, размерность состояния {amplitudes.shape[0]}"
        )
    if term.max_rank >= amplitudes.shape[0]:
        raise EvolutionError(
            f"Слагаемое содержит ранг {term.max_rank}, размерность состояния {amplitudes.shape[0]}"
        )
    if term.fixed_ranks.size:
        amplitudes[term.fixed_ranks] *= np.exp(-1j * term.fixed_values * dt)
    if term.first.size:
        angle = term.magnitudes * dt
        c = np.cos(angle)
        off = -1j * term.signs * np.sin(angle)
        a1 = amplitudes[term.first]
        a2 = amplitudes[term.second]
        amplitudes[term.first] = c * a1 + off * a2
        amplitudes[term.second] = off * a1 + c * a2


TermLike = Union[OneSparseTerm, _CompiledTerm]


def _compiled(term: TermLike) -> _CompiledTerm:
    return term if isinstance(term, _CompiledTerm) else compile_term(term)


def apply_one_sparse(term: TermLike, dt: float, state: StateVector) -> StateVector:
    """
    exp(-i H_m dt) для одноразреженного слагаемого.

    Для диагонали амплитуда умножается на exp(-i H_qq dt), для пары с
    h = e^(i pi s)|h| блок [[cos, -i e^(i pi s) sin], [-i e^(-i pi s) sin, cos]].

    Raises:
        EvolutionError: Размерность слагаемого не совпадает с размерностью состояния
    """
    result = state.copy()
    _apply_compiled(_compiled(term), dt, result.amplitudes)
    return result


def _rz(theta: float) -> np.ndarray:
    return np.array([[np.exp(-0.5j * theta), 0.0], [0.0, np.exp(0.5j * theta)]], dtype=complex)


def _ry(theta: float) -> np.ndarray:
    c, s = math.cos(theta / 2), math.sin(theta / 2)
    return np.array([[c, -s], [s, c]], dtype=complex)


def rotation_sequence(h_abs: float, s: int, dt: float) -> TwoByTwoUnitary:
    """
    Блок пары как произведение поворотов:
    Rz(-pi/2) Rz(-pi s) Ry(2|h|dt) Rz(pi s) Rz(pi/2).
    """
    if s not in (0, 1):
        raise EvolutionError(f"Бит знака должен быть 0 или 1, получено {s}")
    if h_abs < 0:
        raise EvolutionError(f"Модуль элемента отрицателен: {h_abs}")
    factors = [
        _rz(-math.pi / 2),
        _rz(-math.pi * s),
        _ry(2 * h_abs * dt),
        _rz(math.pi * s),
        _rz(math.pi / 2),
    ]
    product = np.eye(2, dtype=complex)
    for factor in factors:
        product = product @ factor
    return TwoByTwoUnitary(product)


def one_sparse_block(h: float, dt: float) -> TwoByTwoUnitary:
    """Замкнутая форма exp(-i [[0, h], [h, 0]] dt)."""
    angle = abs(h) * dt
    sign = -1.0 if h < 0 else 1.0
    c = math.cos(angle)
    off = -1j * sign * math.sin(angle)
    return TwoByTwoUnitary(np.array([[c, off], [off, c]], dtype=complex))


def equal_up_to_global_phase(a: np.ndarray, b: np.ndarray) -> float:
    """
    Отклонение a от b с точностью до глобальной фазы.

    Returns:
        max |a - e^(i phi) b| при фазе, выровненной по наибольшему элементу b
    """
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    if a.shape != b.shape:
        raise EvolutionError(f"Разные размеры: {a.shape} и {b.shape}")
    index = np.unravel_index(np.argmax(np.abs(b)), b.shape)
    if abs(b[index]) == 0.0:
        return float(np.max(np.abs(a)))
    phase = a[index] / b[index]
    phase = phase / abs(phase) if abs(phase) > 0 else 1.0
    return float(np.max(np.abs(a - phase * b)))


def suzuki_coefficient(level: int) -> float:
    """
    Коэффициент рекурсии Судзуки s_l = 1 / (4 - 4^(1/(2l-1))).

    Raises:
        EvolutionError: level < 2
    """
    if not isinstance(level, int) or level < 2:
        raise EvolutionError(f"Уровень рекурсии Судзуки должен быть не меньше 2, получено {level}")
    return 1.0 / (4.0 - 4.0 ** (1.0 / (2 * level - 1)))


def _validate_order(order: int) -> None:
    if not isinstance(order, int) or order < 1 or (order != 1 and order % 2):
        raise EvolutionError(f"Недопустимый порядок формулы: {order} (1 или чётный)")


def trotter_schedule(n_terms: int, order: int) -> List[Tuple[int, float]]:
    """
    Последовательность (индекс слагаемого, доля шага) для одного шага.

    Raises:
        EvolutionError: Нечётный порядок больше 1
    """
    _validate_order(order)
    if order == 1:
        return [(index, 1.0) for index in range(n_terms)]
    if order == 2:
        forward = [(index, 0.5) for index in range(n_terms)]
        return forward + forward[::-1]

    p = suzuki_coefficient(order // 2)
    inner = trotter_schedule(n_terms, order - 2)
    outer = [(index, weight * p) for index, weight in inner]
    middle = [(index, weight * (1 - 4 * p)) for index, weight in inner]
    return outer + outer + middle + outer + outer


def trotter_step(
    terms: Sequence[TermLike], dt: float, order: int
) -> Callable[[StateVector], StateVector]:
    """
    Один шаг формулы произведения как преобразование состояния.

    Returns:
        Функция, применяющая шаг к копии состояния
    """
    compiled = [_compiled(term) for term in terms]
    schedule = trotter_schedule(len(compiled), order)

    def step(state: StateVector) -> StateVector:
        result = state.copy()
        for index, weight in schedule:
            _apply_compiled(compiled[index], weight * dt, result.amplitudes)
        return result

    return step


@dataclass
class TrotterPlan:
    """План эволюции: порядок, число шагов, время и порядок слагаемых."""
    order: int
    steps: int
    t: float
    terms: List[OneSparseTerm] = field(default_factory=list)

    def __post_init__(self):
        _validate_order(self.order)
        if not isinstance(self.steps, int) or self.steps < 1:
            raise EvolutionError(f"Число шагов должно быть положительным: {self.steps}")

    @property
    def dt(self) -> float:
        return self.t / self.steps


def evolve(
    terms: Sequence[TermLike],
    t: float,
    steps: int,
    order: int,
    initial: StateVector,
    summary: Optional[EvolutionSummary] = None,
    max_amplitudes: Optional[int] = None,
) -> StateVector:
    """
    Применяет trotter_step(terms, t/steps, order) steps раз.

    Args:
        terms: Слагаемые разложения в фиксированном порядке
        t: Время (атомные единицы)
        steps: Число шагов
        order: Порядок формулы
        initial: Начальное состояние
        summary: Сводка, в которую записывается дрейф нормы
        max_amplitudes: Ограничение на размерность состояния

    Raises:
        EvolutionError: Недопустимые параметры
        CapExceededError: Размерность больше допустимой
    """
    plan = TrotterPlan(order=order, steps=steps, t=t)
    limit = max_amplitudes if max_amplitudes is not None else settings.limits.evolution_cap
    ensure_within_cap("evolution_cap", initial.dim, limit)

    if summary is not None:
        summary.status = EvolutionStatus.IN_PROGRESS
        summary.start_time = datetime.now()
        summary.order, summary.steps, summary.time, summary.terms = order, steps, t, len(terms)

    start_time = time.time()
    initial_norm = initial.norm()
    compiled = [_compiled(term) for term in terms]
    schedule = trotter_schedule(len(compiled), order)
    amplitudes = initial.amplitudes.copy()

    try:
        with get_metrics_collector().timer("evolve"):
            for completed in range(1, steps + 1):
                for index, weight in schedule:
                    _apply_compiled(compiled[index], weight * plan.dt, amplitudes)
                if summary is not None:
                    summary.completed_steps = completed
    except Exception as e:
        if summary is not None:
            summary.status = EvolutionStatus.FAILED
            summary.error_message = str(e)
            summary.end_time = datetime.now()
        raise

    result = StateVector(amplitudes)
    drift = abs(result.norm() - initial_norm)
    if summary is not None:
        summary.norm_drift = drift
        summary.status = EvolutionStatus.COMPLETED
        summary.end_time = datetime.now()

    logger.info(
        f"Эволюция завершена за {time.time() - start_time:.3f}с",
        extra={"extra_data": {"order": order, "steps": steps, "terms": len(terms), "norm_drift": drift}},
    )
    return result


def term_matrix(term: OneSparseTerm, dim: int) -> sparse.csr_matrix:
    """Слагаемое H_m как полная симметричная матрица."""
    rows, cols, values = [], [], []
    for q, value in term.fixed:
        rows.append(q)
        cols.append(q)
        values.append(value)
    for q1, q2, value in term.pairs:
        rows.extend((q1, q2))
        cols.extend((q2, q1))
        values.extend((value, value))
    return sparse.csr_matrix((values, (rows, cols)), shape=(dim, dim), dtype=float)


def exact_dense_evolution(
    hamiltonian: np.ndarray,
    t: float,
    amplitudes: np.ndarray,
    residual_tolerance: Optional[float] = None,
) -> np.ndarray:
    """
    V exp(-i Lambda t) V+ psi через эрмитово разложение.

    Raises:
        NumericalCheckError: Невязка разложения выше допуска
    """
    tolerance = residual_tolerance if residual_tolerance is not None else settings.numerics.eigen_residual_tolerance
    eigenvalues, vectors = linalg.eigh(hamiltonian)
    residual = float(np.max(np.abs(hamiltonian @ vectors - vectors * eigenvalues), initial=0.0))
    if residual >= tolerance:
        raise NumericalCheckError(f"Невязка спектрального разложения {residual:.3e} превышает {tolerance:.1e}")
    coefficients = vectors.conj().T @ amplitudes
    return vectors @ (np.exp(-1j * eigenvalues * t) * coefficients)


def exact_reference(
    matrix: SparseCiMatrix,
    t: float,
    initial: StateVector,
    dense_cap: Optional[int] = None,
    residual_tolerance: Optional[float] = None,
) -> StateVector:
    """
    Точная эволюция через плотную матрицу.

    Raises:
        CapExceededError: Размерность больше dense_reference_cap
        NumericalCheckError: Невязка разложения выше допуска
        EvolutionError: Размерность состояния не совпадает с матрицей
    """
    limit = dense_cap if dense_cap is not None else settings.limits.dense_reference_cap
    ensure_within_cap("dense_reference_cap", matrix.dimension, limit)
    if initial.dim != matrix.dimension:
        raise EvolutionError(f"Размерность состояния {initial.dim} не совпадает с матрицей {matrix.dimension}")
    with get_metrics_collector().timer("exact_reference"):
        amplitudes = exact_dense_evolution(matrix.to_dense(), t, initial.amplitudes, residual_tolerance)
    return StateVector(amplitudes)


def fidelity(first: StateVector, second: StateVector) -> float:
    """|<psi_1|psi_2>|, ограниченное отрезком [0, 1]."""
    if first.dim != second.dim:
        raise EvolutionError(f"Разные размерности: {first.dim} и {second.dim}")
    overlap = abs(np.vdot(first.amplitudes, second.amplitudes))
    return float(min(max(overlap, 0.0), 1.0))


def state_distance(first: StateVector, second: StateVector) -> float:
    """Евклидова норма разности."""
    if first.dim != second.dim:
        raise EvolutionError(f"Разные размерности: {first.dim} и {second.dim}")
    return float(np.linalg.norm(first.amplitudes - second.amplitudes))


def ground_energy(matrix: SparseCiMatrix, dense_cap: Optional[int] = None) -> float:
    """
    Наименьшее собственное значение H плюс энергия ядер.

    Raises:
        CapExceededError: Размерность больше dense_reference_cap
    """
    limit = dense_cap if dense_cap is not None else settings.limits.dense_reference_cap
    ensure_within_cap("dense_reference_cap", matrix.dimension, limit)
    eigenvalues = linalg.eigvalsh(matrix.to_dense())
    return float(eigenvalues[0]) + matrix.table.core_energy


class ConvergenceResult(NamedTuple):
    """Ошибка по сетке шагов и наклон в логарифмических осях."""
    points: List[Tuple[float, float]]
    slope: Optional[float]


def measure_convergence(
    matrix: SparseCiMatrix,
    terms: Sequence[TermLike],
    t: float,
    order: int,
    step_grid: Sequence[int],
    initial: StateVector,
    error_floor: float = 1e-12,
    dense_cap: Optional[int] = None,
) -> ConvergenceResult:
    """
    Ошибка ||psi_trotter - psi_exact|| для каждого числа шагов и наклон по dt.

    Точки с ошибкой ниже error_floor в подгонку не входят.
    """
    reference = exact_reference(matrix, t, initial, dense_cap=dense_cap)
    compiled = [_compiled(term) for term in terms]
    points: List[Tuple[float, float]] = []
    for steps in step_grid:
        state = evolve(compiled, t, steps, order, initial)
        points.append((t / steps, state_distance(state, reference)))

    usable = [(dt, error) for dt, error in points if error > error_floor and dt > 0]
    slope: Optional[float] = None
    if len(usable) >= 2:
        log_dt = np.log([dt for dt, _ in usable])
        log_error = np.log([error for _, error in usable])
        slope = float(np.polyfit(log_dt, log_error, 1)[0])

    logger.info(
        "Измерение сходимости",
        extra={"extra_data": {"order": order, "points": len(points), "slope": slope}},
    )
    return ConvergenceResult(points=points, slope=slope)
