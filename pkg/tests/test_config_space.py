"""Тесты пространства конфигураций."""

import math
from itertools import combinations

import pytest

from src.ci.config_space import (
    ConfigSpaceError,
    SpaceParams,
    color_register_bits,
    configurations,
    dimension,
    encode,
    n_excl,
    n_incl,
    neighbor_count,
    neighbors,
    orbital_counts,
    orbital_list,
    rank,
    register_widths,
    sparsity,
    unrank,
)


@pytest.mark.parametrize("orbitals, expected", [([1, 2], 3), ([1, 4], 9), ([3], 4)])
def test_encode(orbitals, expected):
    """Тест кодирования набора орбиталей в битовую маску."""
    assert encode(orbitals) == expected


@pytest.mark.parametrize("x, expected", [(3, [1, 2]), (9, [1, 4]), (12, [3, 4])])
def test_orbital_list(x, expected):
    """Тест списка занятых орбиталей."""
    assert orbital_list(x) == expected
    assert encode(orbital_list(x)) == x


@pytest.mark.parametrize("orbitals", [[0, 1], [1, 5], [2, 2], [1]])
def test_encode_rejects_invalid(orbitals, space_4_2):
    """Тест отказа: орбиталь вне диапазона, повтор, неверное число электронов."""
    with pytest.raises(ConfigSpaceError):
        encode(orbitals, space_4_2)


@pytest.mark.parametrize("n_o, n_e", [(0, 0), (64, 1), (4, 5), (4, -1)])
def test_space_params_validation(n_o, n_e):
    """Тест проверки параметров пространства."""
    with pytest.raises(ConfigSpaceError):
        SpaceParams(n_o, n_e)


@pytest.mark.parametrize("n_o, n_e, expected", [(4, 2, 6), (6, 3, 20), (7, 0, 1), (63, 31, math.comb(63, 31))])
def test_dimension(n_o, n_e, expected):
    """Тест размерности пространства."""
    assert dimension(SpaceParams(n_o, n_e)) == expected


@pytest.mark.parametrize("x, q", [(3, 0), (9, 3), (12, 5)])
def test_rank_unrank_examples(x, q, space_4_2):
    """Тест рангов на пространстве (4,2)."""
    assert rank(x, space_4_2) == q
    assert unrank(q, space_4_2) == x


def test_rank_matches_sorted_enumeration(space_4_2):
    """Тест совпадения ранга с позицией в отсортированном переборе."""
    masks = sorted(sum(1 << (i - 1) for i in combo) for combo in combinations(range(1, 5), 2))
    assert masks == [3, 5, 6, 9, 10, 12]
    assert list(configurations(space_4_2)) == masks


def test_rank_rejects_wrong_population(space_4_2):
    """Тест отказа для конфигурации с неверным числом электронов."""
    with pytest.raises(ConfigSpaceError):
        rank(7, space_4_2)
    with pytest.raises(ConfigSpaceError):
        rank(1 << 5 | 1, space_4_2)


@pytest.mark.parametrize("q", [-1, 6])
def test_unrank_rejects_out_of_range(q, space_4_2):
    """Тест отказа для ранга вне диапазона."""
    with pytest.raises(ConfigSpaceError):
        unrank(q, space_4_2)


def test_bijection_and_monotonicity():
    """Тест биекции и монотонности рангов для всех n_o <= 12."""
    for n_o in range(1, 13):
        for n_e in range(0, n_o + 1):
            params = SpaceParams(n_o, n_e)
            previous = -1
            for q, x in enumerate(configurations(params)):
                assert x > previous
                assert rank(x, params) == q
                assert unrank(q, params) == x
                previous = x
            assert q + 1 == dimension(params)


@pytest.mark.parametrize("x, i, incl, excl", [(9, 4, 1, 2), (3, 3, 2, 0), (12, 1, 0, 0)])
def test_orbital_counts(x, i, incl, excl):
    """Тест подсчёта занятых и свободных орбиталей ниже i."""
    assert n_incl(x, i) == incl
    assert n_excl(x, i) == excl
    assert orbital_counts(x, i) == (incl, excl)


def test_orbital_counts_sum():
    """Тест n_incl + n_excl = i - 1."""
    params = SpaceParams(6, 3)
    for x in configurations(params):
        for i in range(1, 7):
            assert n_incl(x, i) + n_excl(x, i) == i - 1


def test_neighbors_examples(space_4_2):
    """Тест соседей конфигурации {1,2}."""
    assert neighbors(3, 1, space_4_2) == [5, 6, 9, 10]
    assert neighbors(3, 2, space_4_2) == [12]
    full = SpaceParams(3, 3)
    assert neighbors(7, 1, full) == []


def test_neighbors_rejects_degree(space_4_2):
    """Тест отказа для степени возбуждения, отличной от 1 и 2."""
    with pytest.raises(ConfigSpaceError):
        neighbors(3, 3, space_4_2)


@pytest.mark.parametrize("n_o, n_e, expected", [(4, 2, 6), (6, 2, 15), (6, 3, 19), (5, 5, 1), (3, 3, 1)])
def test_sparsity_examples(n_o, n_e, expected):
    """Тест формулы разреженности."""
    assert sparsity(SpaceParams(n_o, n_e)) == expected


def test_sparsity_matches_neighbor_enumeration():
    """Тест: 1 + число соседей = разреженность для каждой строки, n_o <= 10."""
    for n_o in range(1, 11):
        for n_e in range(0, n_o + 1):
            params = SpaceParams(n_o, n_e)
            d = sparsity(params)
            singles, doubles = neighbor_count(params, 1), neighbor_count(params, 2)
            for x in configurations(params):
                first = neighbors(x, 1, params)
                second = neighbors(x, 2, params)
                assert len(first) == singles
                assert len(second) == doubles
                assert 1 + len(first) + len(second) == d
                assert first == sorted(set(first))
                assert second == sorted(set(second))


def test_register_widths():
    """Тест ширины регистров и регистра цветов."""
    assert register_widths(SpaceParams(4, 2)) == (4, 3)
    assert register_widths(SpaceParams(3, 3)) == (3, 0)
    assert color_register_bits(SpaceParams(4, 2)) == 3
    assert color_register_bits(SpaceParams(6, 3)) == 5


if __name__ == "__main__":
    pytest.main([__file__, "-v"])
