"""
Конфигурация pytest для тестов проекта.
"""

import sys
from pathlib import Path

import pytest

# Добавляем корневую директорию проекта в sys.path
project_root = Path(__file__).parent.parent
sys.path.insert(0, str(project_root))


@pytest.fixture
def space_4_2():
    """Пространство 4 спин-орбитали, 2 электрона (D = 6)."""
    from src.ci.config_space import SpaceParams
    return SpaceParams(4, 2)


@pytest.fixture
def diagonal_table_4():
    """Таблица h_pp = p для 4 спин-орбиталей."""
    from src.ci.integrals import synthetic_table
    return synthetic_table("diagonal-one-body", 0, 4)


@pytest.fixture
def random_table_factory():
    """Фабрика случайных симметричных таблиц по зерну и числу спин-орбиталей."""
    from src.ci.integrals import synthetic_table

    def factory(seed: int, n_so: int):
        return synthetic_table("random-symmetric", seed, n_so)

    return factory


@pytest.fixture
def sample_fcidump(tmp_path):
    """FCIDUMP с двумя пространственными орбиталями (минимальный базис H2)."""
    text = (
        " &FCI NORB=2,NELEC=2,MS2=0,\n"
        "  ORBSYM=1,1,\n"
        "  ISYM=1,\n"
        " &END\n"
        "  0.6757101548D+00   1   1   1   1\n"
        "  0.1809270452D+00   2   1   2   1\n"
        "  0.6645817350D+00   2   2   1   1\n"
        "  0.6985113194D+00   2   2   2   2\n"
        " -0.1252477303D+01   1   1   0   0\n"
        " -0.4759344611D+00   2   2   0   0\n"
        " -0.5783020000D+00   1   0   0   0\n"
        "  0.7137539936D+00   0   0   0   0\n"
    )
    path = tmp_path / "h2.fcidump"
    path.write_text(text, encoding="utf-8")
    return path
