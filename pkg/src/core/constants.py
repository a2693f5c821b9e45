"""
Константы проекта.
"""

# Идентификация инструмента в отчётах
TOOL_NAME = "ci-sim"
TOOL_VERSION = "1.0.0"

# Пространство конфигураций
MAX_BITMASK_ORBITALS = 63  # ширина битовой маски конфигурации
RANK_WIDTH_BITS = 64

# Ограничения ресурсов
DEFAULT_MAX_CI_DIMENSION = 20_000
DEFAULT_DENSE_REFERENCE_CAP = 512
DEFAULT_EVOLUTION_CAP = 1_000_000
DEFAULT_ORACLE_MAX_ORBITALS = 12
DEFAULT_ENUMERATION_CAP = 20_000

# Численные допуски
DUPLICATE_TOLERANCE = 1e-12
EIGEN_RESIDUAL_TOLERANCE = 1e-10
NORM_TOLERANCE = 1e-9
UNITARITY_TOLERANCE = 1e-12

# Текстовые форматы
FLOAT_SIGNIFICANT_DIGITS = 17
DEFAULT_VALUE_BITS = 16

# Коды завершения CLI
EXIT_OK = 0
EXIT_USAGE = 2
EXIT_CAP = 3
EXIT_NUMERICAL = 4

# Логирование
LOG_FORMAT = "%(asctime)s - %(name)s - %(levelname)s - %(message)s"
LOG_DATE_FORMAT = "%Y-%m-%d %H:%M:%S"

# Временные файлы
TEMP_FILE_PREFIX = "ci_sim_"
