"""Тесты таблицы интегралов."""

from itertools import product

import numpy as np
import pytest

from src.ci.integrals import (
    IntegralError,
    IntegralTableBuilder,
    Spin,
    SpinOrbitalMap,
    canonical_two_body,
    expand_spatial,
    physicist_partners,
    synthetic_table,
)


def test_spin_orbital_map():
    """Тест чередующейся нумерации спин-орбиталей."""
    mapping = SpinOrbitalMap(3)
    assert mapping.n_spin_orbitals == 6
    assert mapping.to_spin_orbital(1, Spin.ALPHA) == 1
    assert mapping.to_spin_orbital(1, Spin.BETA) == 2
    assert mapping.to_spin_orbital(3, Spin.BETA) == 6
    seen = {mapping.to_spin_orbital(i, spin) for i in range(1, 4) for spin in Spin}
    assert seen == set(range(1, 7))
    for p in range(1, 7):
        spatial, spin = mapping.from_spin_orbital(p)
        assert mapping.to_spin_orbital(spatial, spin) == p


def test_canonical_key_is_shared_by_partners():
    """Тест: все 8 симметричных партнёров имеют один ключ."""
    for indices in product(range(1, 5), repeat=4):
        keys = {canonical_two_body(*partner) for partner in physicist_partners(*indices)}
        assert len(keys) == 1


def test_diagonal_table(diagonal_table_4):
    """Тест диагональной синтетической таблицы."""
    assert diagonal_table_4.one_electron(3, 3) == 3.0
    assert diagonal_table_4.one_electron(2, 2) == 2.0
    assert diagonal_table_4.one_electron(1, 2) == 0.0
    assert diagonal_table_4.one_electron(1, 3) == 0.0
    assert diagonal_table_4.antisymmetrized(1, 2, 1, 2) == 0.0


def test_one_electron_spin_selection():
    """Тест: элементы между разными спинами равны нулю, запись ненулевого запрещена."""
    builder = IntegralTableBuilder(4)
    builder.set_one_body(1, 3, 0.25)
    with pytest.raises(IntegralError):
        builder.set_one_body(1, 2, 0.5)
    table = builder.build()
    assert table.one_electron(1, 3) == 0.25
    assert table.one_electron(3, 1) == 0.25
    assert table.one_electron(1, 2) == 0.0


def test_antisymmetrized_arithmetic():
    """Тест <pq||rs> = <pq|rs> - <pq|sr>."""
    builder = IntegralTableBuilder(4)
    builder.set_two_body(1, 3, 1, 3, 0.7)
    builder.set_two_body(1, 3, 3, 1, 0.2)
    table = builder.build()
    assert table.antisymmetrized(1, 3, 1, 3) == pytest.approx(0.5)
    assert table.antisymmetrized(1, 3, 3, 1) == pytest.approx(-0.5)
    assert table.antisymmetrized(1, 1, 3, 3) == 0.0


def test_two_electron_symmetry_lookup():
    """Тест: значение доступно по любому симметричному партнёру."""
    builder = IntegralTableBuilder(8)
    builder.set_two_body(1, 4, 3, 6, 0.125)
    table = builder.build()
    for partner in physicist_partners(1, 4, 3, 6):
        assert table.two_electron(*partner) == 0.125
    assert table.audit() == []


def test_conflicting_duplicate_rejected():
    """Тест отказа для противоречивого повтора."""
    builder = IntegralTableBuilder(4, tolerance=1e-12)
    builder.set_two_body(1, 3, 1, 3, 0.7)
    builder.set_two_body(3, 1, 3, 1, 0.7)
    with pytest.raises(IntegralError):
        builder.set_two_body(1, 3, 1, 3, 0.7 + 1e-9)


@pytest.mark.parametrize("value", [float("nan"), float("inf"), float("-inf")])
def test_non_finite_value_rejected(value):
    """Тест отказа для NaN и бесконечных значений."""
    builder = IntegralTableBuilder(4)
    with pytest.raises(IntegralError):
        builder.set_one_body(1, 1, value)
    with pytest.raises(IntegralError):
        builder.set_two_body(1, 3, 1, 3, value)
    with pytest.raises(IntegralError):
        builder.set_core_energy(value)


def test_index_out_of_range(diagonal_table_4):
    """Тест отказа для индекса вне диапазона."""
    with pytest.raises(IntegralError):
        diagonal_table_4.one_electron(0, 1)
    with pytest.raises(IntegralError):
        diagonal_table_4.two_electron(1, 2, 3, 5)


def test_random_table_deterministic(random_table_factory):
    """Тест: одинаковое зерно даёт одинаковые таблицы."""
    first = random_table_factory(7, 6)
    second = random_table_factory(7, 6)
    assert list(first.one_body_items()) == list(second.one_body_items())
    assert list(first.two_body_items()) == list(second.two_body_items())
    assert first.core_energy == second.core_energy
    third = random_table_factory(8, 6)
    assert list(first.two_body_items()) != list(third.two_body_items())


def test_random_table_invariants(random_table_factory):
    """Тест симметрий случайной таблицы и антисимметрии, n_so <= 8."""
    table = random_table_factory(3, 8)
    assert table.audit() == []
    for p, q in product(range(1, 9), repeat=2):
        assert table.one_electron(p, q) == table.one_electron(q, p)
    for p, q, r, s in product(range(1, 9), repeat=4):
        assert table.antisymmetrized(p, q, r, s) == -table.antisymmetrized(p, q, s, r)
        value = table.two_electron(p, q, r, s)
        assert value == table.two_electron(q, p, s, r)
        assert value == table.two_electron(r, s, p, q)
        assert value == table.two_electron(r, q, p, s)


def test_random_table_rejects_odd():
    """Тест отказа для нечётного числа спин-орбиталей."""
    with pytest.raises(IntegralError):
        synthetic_table("random-symmetric", 0, 5)
    with pytest.raises(IntegralError):
        synthetic_table("unknown", 0, 4)


def test_expand_spatial_spin_channels():
    """Тест раскладки (11|11) по четырём спиновым каналам."""
    h = np.zeros((1, 1))
    eri = np.full((1, 1, 1, 1), 0.5)
    table = expand_spatial(h, eri)
    for p, q, r, s in product(range(1, 3), repeat=4):
        expected = 0.5 if (p % 2 == r % 2 and q % 2 == s % 2) else 0.0
        assert table.two_electron(p, q, r, s) == expected


if __name__ == "__main__":
    pytest.main([__file__, "-v"])
