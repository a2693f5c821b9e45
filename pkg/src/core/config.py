"""Конфигурация приложения."""

from pydantic import BaseModel
from pydantic_settings import BaseSettings, SettingsConfigDict

from src.core.constants import (
    DEFAULT_MAX_CI_DIMENSION,
    DEFAULT_DENSE_REFERENCE_CAP,
    DEFAULT_EVOLUTION_CAP,
    DEFAULT_ORACLE_MAX_ORBITALS,
    DEFAULT_ENUMERATION_CAP,
    DUPLICATE_TOLERANCE,
    EIGEN_RESIDUAL_TOLERANCE,
    NORM_TOLERANCE,
)


class LimitsConfig(BaseModel):
    """Ограничения на размер задач."""
    max_ci_dimension: int = DEFAULT_MAX_CI_DIMENSION
    dense_reference_cap: int = DEFAULT_DENSE_REFERENCE_CAP
    evolution_cap: int = DEFAULT_EVOLUTION_CAP
    oracle_max_orbitals: int = DEFAULT_ORACLE_MAX_ORBITALS
    enumeration_cap: int = DEFAULT_ENUMERATION_CAP


class NumericsConfig(BaseModel):
    """Численные допуски."""
    duplicate_tolerance: float = DUPLICATE_TOLERANCE
    eigen_residual_tolerance: float = EIGEN_RESIDUAL_TOLERANCE
    norm_tolerance: float = NORM_TOLERANCE


class RuntimeConfig(BaseModel):
    """Параметры выполнения."""
    log_level: str = "WARNING"
    logs_directory: str = "data/logs"
    log_to_file: bool = False
    debug: bool = False
    max_workers: int = 1


class Settings(BaseSettings):
    """Основные настройки приложения."""

    # Ограничения
    max_ci_dimension: int = DEFAULT_MAX_CI_DIMENSION
    dense_reference_cap: int = DEFAULT_DENSE_REFERENCE_CAP
    evolution_cap: int = DEFAULT_EVOLUTION_CAP
    oracle_max_orbitals: int = DEFAULT_ORACLE_MAX_ORBITALS
    enumeration_cap: int = DEFAULT_ENUMERATION_CAP

    # Допуски
    duplicate_tolerance: float = DUPLICATE_TOLERANCE
    eigen_residual_tolerance: float = EIGEN_RESIDUAL_TOLERANCE
    norm_tolerance: float = NORM_TOLERANCE

    # Логирование
    log_level: str = "WARNING"
    logs_directory: str = "data/logs"
    log_to_file: bool = False

    # Параллельная сборка матрицы по строкам
    max_workers: int = 1

    # Режим разработки
    debug: bool = False

    model_config = SettingsConfigDict(
        env_prefix="CI_SIM_",
        env_file=".env",
        env_file_encoding="utf-8",
        case_sensitive=False,
        extra="ignore",
    )

    @property
    def limits(self) -> LimitsConfig:
        """Получить ограничения на размер задач."""
        return LimitsConfig(
            max_ci_dimension=self.max_ci_dimension,
            dense_reference_cap=self.dense_reference_cap,
            evolution_cap=self.evolution_cap,
            oracle_max_orbitals=self.oracle_max_orbitals,
            enumeration_cap=self.enumeration_cap,
        )

    @property
    def numerics(self) -> NumericsConfig:
        """Получить численные допуски."""
        return NumericsConfig(
            duplicate_tolerance=self.duplicate_tolerance,
            eigen_residual_tolerance=self.eigen_residual_tolerance,
            norm_tolerance=self.norm_tolerance,
        )

    @property
    def runtime(self) -> RuntimeConfig:
        """Получить параметры выполнения."""
        return RuntimeConfig(
            log_level=self.log_level,
            logs_directory=self.logs_directory,
            log_to_file=self.log_to_file,
            debug=self.debug,
            max_workers=max(1, self.max_workers),
        )


# Глобальный экземпляр настроек
settings = Settings()
