"""
Модуль валидации входных данных.
"""

from pathlib import Path
from typing import Any, List, Literal, Optional

from pydantic import BaseModel, Field, field_validator, model_validator
from pydantic import ValidationError as PydanticValidationError

from src.core.constants import DEFAULT_VALUE_BITS, MAX_BITMASK_ORBITALS


class ValidationError(Exception):
    """Исключение для ошибок валидации."""
    pass


class CapExceededError(Exception):
    """Исключение при превышении ограничения на размер задачи."""

    def __init__(self, cap_name: str, limit: int, requested: int):
        super().__init__(
            f"Превышено ограничение {cap_name}: запрошено {requested}, допустимо {limit}"
        )
        self.cap_name = cap_name
        self.limit = limit
        self.requested = requested


class NumericalCheckError(Exception):
    """Исключение при провале численной проверки."""
    pass


def ensure_within_cap(cap_name: str, requested: int, limit: int) -> None:
    """
    Проверка размера задачи.

    Args:
        cap_name: Имя ограничения (попадает в сообщение)
        requested: Запрошенный размер
        limit: Допустимый размер

    Raises:
        CapExceededError: При превышении ограничения
    """
    if requested > limit:
        raise CapExceededError(cap_name, limit, requested)


def parse_orbital_list(value: str) -> List[int]:
    """
    Разбор списка орбиталей вида "1,2,5".

    Raises:
        ValidationError: Если элемент не является целым числом
    """
    items = [item.strip() for item in value.split(",") if item.strip()]
    try:
        return [int(item) for item in items]
    except ValueError:
        raise ValidationError(f"Недопустимый список орбиталей: {value!r}")


class RunConfig(BaseModel):
    """Модель для валидации параметров запуска команды."""

    command: Literal["info", "matrix", "color", "verify-labels", "evolve"]
    orbitals: Optional[int] = Field(default=None, ge=1, le=MAX_BITMASK_ORBITALS, description="Число спин-орбиталей")
    electrons: Optional[int] = Field(default=None, ge=0, le=MAX_BITMASK_ORBITALS, description="Число электронов")
    integrals: Optional[str] = Field(default=None, description="Путь к FCIDUMP файлу")
    synthetic: Optional[Literal["diagonal", "random"]] = None
    seed: int = Field(default=0, ge=0, lt=2**64)
    scheme: Literal["descriptor", "pairlabel", "pairlabel-formula"] = "descriptor"
    sign_mode: Literal["fermionic", "paper-literal"] = "fermionic"
    time: float = 1.0
    steps: int = Field(default=1, ge=1)
    order: int = Field(default=2, ge=1)
    initial: Optional[List[int]] = None
    initial_state: Optional[str] = None
    output: Optional[str] = None
    format: Literal["triplet", "report"] = "triplet"
    strict_formulas: bool = False
    convergence: bool = False
    value_bits: int = Field(default=DEFAULT_VALUE_BITS, ge=2, le=64)
    max_dimension: Optional[int] = Field(default=None, ge=1)
    dense_cap: Optional[int] = Field(default=None, ge=1)

    @field_validator("initial", mode="before")
    @classmethod
    def validate_initial(cls, v: Any) -> Any:
        """Список орбиталей допускается строкой "1,2"."""
        if isinstance(v, str):
            try:
                return parse_orbital_list(v)
            except ValidationError as e:
                raise ValueError(str(e))
        return v

    @field_validator("order")
    @classmethod
    def validate_order(cls, v: int) -> int:
        """Порядок формулы: 1 или чётный."""
        if v != 1 and v % 2 != 0:
            raise ValueError("Порядок формулы Троттера должен быть 1 или чётным")
        return v

    @field_validator("integrals")
    @classmethod
    def validate_integrals(cls, v: Optional[str]) -> Optional[str]:
        """Файл интегралов должен существовать."""
        if v is not None and not Path(v).is_file():
            raise ValueError(f"Файл интегралов не найден: {v}")
        return v

    @model_validator(mode="after")
    def validate_sources(self) -> "RunConfig":
        """Согласованность источников параметров пространства."""
        if self.integrals and self.synthetic:
            raise ValueError("Нельзя одновременно указывать --integrals и --synthetic")
        if self.initial is not None and self.initial_state is not None:
            raise ValueError("Нельзя одновременно указывать --initial и --initial-state")
        if self.orbitals is not None and self.electrons is not None and self.electrons > self.orbitals:
            raise ValueError("Число электронов превышает число орбиталей")
        if self.integrals is None:
            if self.orbitals is None or self.electrons is None:
                raise ValueError("Требуются --orbitals и --electrons (или --integrals)")
        if self.command in ("matrix", "color", "evolve") and not (self.integrals or self.synthetic):
            raise ValueError("Требуется источник интегралов: --integrals или --synthetic")
        return self


def build_run_config(**kwargs: Any) -> RunConfig:
    """
    Построение RunConfig с приведением ошибок pydantic к ValidationError.

    Raises:
        ValidationError: При ошибке валидации
    """
    try:
        return RunConfig(**kwargs)
    except PydanticValidationError as e:
        messages = "; ".join(
            f"{'.'.join(str(part) for part in err['loc']) or 'config'}: {err['msg']}"
            for err in e.errors()
        )
        raise ValidationError(messages)
