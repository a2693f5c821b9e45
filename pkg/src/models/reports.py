"""Модели отчётов проверки раскраски и эволюции."""

from dataclasses import dataclass, field
from datetime import datetime
from enum import Enum
from typing import Any, Dict, List, Optional, Tuple

from pydantic import BaseModel, Field


class EvolutionStatus(str, Enum):
    """Статус расчёта эволюции."""

    IDLE = "idle"
    IN_PROGRESS = "in_progress"
    COMPLETED = "completed"
    FAILED = "failed"


class ColorViolation(BaseModel):
    """Два ребра одного цвета у одного узла (конфигурации - битовые маски)."""
    node: int = Field(..., description="Общий узел")
    color: str = Field(..., description="Метка цвета")
    neighbor_1: int = Field(..., description="Первый сосед")
    neighbor_2: int = Field(..., description="Второй сосед")

    @property
    def is_trio(self) -> bool:
        """Соседи по разные стороны от узла: x < y < z."""
        return min(self.neighbor_1, self.neighbor_2) < self.node < max(self.neighbor_1, self.neighbor_2)


class FormulaMismatch(BaseModel):
    """Расхождение замкнутых формул меток с подсчётом соседей."""
    x: int
    y: int
    excitation_class: int = Field(..., ge=1, le=2)
    formula: Tuple[int, int]
    oracle: Tuple[int, int]


class ColoringReport(BaseModel):
    """Результат полной проверки правильности раскраски."""
    scheme: str
    n_o: int
    n_e: int
    edges: int = 0
    total_colors: int = 0
    incident_distribution: Dict[int, int] = Field(default_factory=dict)
    violations: List[ColorViolation] = Field(default_factory=list)
    formula_mismatches: List[FormulaMismatch] = Field(default_factory=list)
    formula_checked: int = 0
    normative_proper: Optional[bool] = None

    @property
    def proper(self) -> bool:
        """Каждый цветовой класс одноразреженный."""
        return not self.violations

    @property
    def trio_violations(self) -> List[ColorViolation]:
        return [violation for violation in self.violations if violation.is_trio]


@dataclass
class EvolutionSummary:
    """Сводка по эволюции состояния."""

    status: EvolutionStatus = EvolutionStatus.IDLE
    order: int = 1
    steps: int = 0
    completed_steps: int = 0
    time: float = 0.0
    terms: int = 0
    norm_drift: float = 0.0
    fidelity: Optional[float] = None
    error_vs_reference: Optional[float] = None
    start_time: Optional[datetime] = None
    end_time: Optional[datetime] = None
    error_message: Optional[str] = None
    convergence: List[Tuple[float, float]] = field(default_factory=list)
    convergence_slope: Optional[float] = None

    @property
    def duration_seconds(self) -> Optional[float]:
        """
        Длительность расчёта в секундах.

        Returns:
            Длительность или None, если расчёт не начат
        """
        if not self.start_time:
            return None
        end = self.end_time or datetime.now()
        return (end - self.start_time).total_seconds()

    def to_dict(self) -> Dict[str, Any]:
        """
        Преобразовать в словарь для отчёта.

        Returns:
            Плоский словарь ключ-значение
        """
        result: Dict[str, Any] = {
            "status": self.status.value,
            "order": self.order,
            "steps": self.steps,
            "completed_steps": self.completed_steps,
            "time": self.time,
            "terms": self.terms,
            "norm_drift": self.norm_drift,
        }
        if self.fidelity is not None:
            result["fidelity"] = self.fidelity
        if self.error_vs_reference is not None:
            result["error_vs_reference"] = self.error_vs_reference
        if self.convergence:
            for index, (dt, error) in enumerate(self.convergence):
                result[f"convergence.{index}.dt"] = dt
                result[f"convergence.{index}.error"] = error
        if self.convergence_slope is not None:
            result["convergence_slope"] = self.convergence_slope
        if self.error_message:
            result["error_message"] = self.error_message
        duration = self.duration_seconds
        if duration is not None:
            result["duration_seconds"] = round(duration, 6)
        return result
