"""Тесты правил Слэтера и сборки CI-матрицы."""

from itertools import product

import numpy as np
import pytest

from src.ci.config_space import SpaceParams, configurations, encode, sparsity, unrank
from src.ci.integrals import IntegralTableBuilder, synthetic_table
from src.ci.slater import (
    MatrixElement,
    SignMode,
    SlaterError,
    build_ci_matrix,
    excitation_degree,
    excitation_parity,
    matrix_element,
    polar_decode,
    polar_encode,
    quantization_error,
    second_quantized_column,
    second_quantized_oracle,
)
from src.core.validation import CapExceededError

MODES = [SignMode.FERMIONIC, SignMode.PAPER_LITERAL]


@pytest.mark.parametrize("x, y, expected", [(3, 3, 0), (3, 5, 1), (3, 12, 2), (7, 56, 3)])
def test_excitation_degree(x, y, expected):
    """Тест степени возбуждения."""
    assert excitation_degree(x, y) == expected
    assert excitation_degree(y, x) == expected


def test_diagonal_element(diagonal_table_4):
    """Тест диагонального элемента: сумма h_pp."""
    assert matrix_element(3, 3, diagonal_table_4) == 3.0
    assert matrix_element(12, 12, diagonal_table_4) == 7.0


@pytest.mark.parametrize("mode", MODES)
def test_degree_three_is_zero(mode, random_table_factory):
    """Тест: элементы степени > 2 равны нулю."""
    table = random_table_factory(1, 6)
    x, y = encode([1, 2, 3]), encode([4, 5, 6])
    assert matrix_element(x, y, table, mode) == 0.0


def test_fermionic_sign_flip(random_table_factory):
    """Тест: возбуждение 2 -> 4 через занятую орбиталь 3 меняет знак."""
    table = random_table_factory(5, 4)
    x, y = encode([1, 2, 3]), encode([1, 3, 4])
    literal = matrix_element(x, y, table, SignMode.PAPER_LITERAL)
    assert literal != 0.0
    assert matrix_element(x, y, table, SignMode.FERMIONIC) == -literal
    assert excitation_parity(x, y) == -1


def test_mismatched_spaces(diagonal_table_4):
    """Тест отказа для конфигураций с разным числом электронов."""
    with pytest.raises(SlaterError):
        matrix_element(3, 7, diagonal_table_4)
    with pytest.raises(SlaterError):
        matrix_element(3, 1 << 5 | 1, diagonal_table_4)


@pytest.mark.parametrize("n_o", [4, 6])
@pytest.mark.parametrize("mode", MODES)
def test_hermiticity(n_o, mode, random_table_factory):
    """Тест точной эрмитовости для всех пар."""
    table = random_table_factory(11, n_o)
    for n_e in range(n_o + 1):
        configs = list(configurations(SpaceParams(n_o, n_e)))
        for x, y in product(configs, repeat=2):
            assert matrix_element(x, y, table, mode) == matrix_element(y, x, table, mode)


def _assert_oracle_agreement(n_o: int, seed: int) -> None:
    table = synthetic_table("random-symmetric", seed, n_o)
    for n_e in range(n_o + 1):
        params = SpaceParams(n_o, n_e)
        configs = list(configurations(params))
        for y in configs:
            column = second_quantized_column(y, table, n_o)
            for x in configs:
                expected = column.get(x, 0.0)
                actual = matrix_element(x, y, table, SignMode.FERMIONIC)
                assert actual == pytest.approx(expected, abs=1e-10), (x, y)


@pytest.mark.parametrize("seed", [0, 1, 2])
@pytest.mark.parametrize("n_o", [4, 6])
def test_oracle_agreement(n_o, seed):
    """Тест совпадения правил Слэтера со вторичным квантованием."""
    _assert_oracle_agreement(n_o, seed)


@pytest.mark.slow
@pytest.mark.parametrize("seed", [0, 1, 2])
def test_oracle_agreement_eight_orbitals(seed):
    """Тест совпадения со вторичным квантованием для n_o = 8."""
    _assert_oracle_agreement(8, seed)


def test_oracle_examples(diagonal_table_4, space_4_2, random_table_factory):
    """Тест эталона: оператор числа частиц и нулевые элементы степени 3."""
    assert second_quantized_oracle(3, 3, diagonal_table_4, space_4_2) == pytest.approx(3.0)
    table = random_table_factory(4, 6)
    params = SpaceParams(6, 3)
    assert second_quantized_oracle(encode([1, 2, 3]), encode([4, 5, 6]), table, params) == 0.0


def test_oracle_cap(random_table_factory):
    """Тест отказа эталона для больших пространств."""
    table = random_table_factory(0, 14)
    params = SpaceParams(14, 2)
    with pytest.raises(CapExceededError):
        second_quantized_oracle(3, 3, table, params)


def test_padding_invariance(random_table_factory):
    """Тест: добавление незанятых орбиталей с нулевыми интегралами не меняет элементов."""
    small = random_table_factory(9, 4)
    builder = IntegralTableBuilder(6)
    for (p, q), value in small.one_body_items():
        builder.set_one_body(p, q, value)
    for (p, r, q, s), value in small.two_body_items():
        builder.set_two_body(p, q, r, s, value)
    padded = builder.build()
    configs = list(configurations(SpaceParams(4, 2)))
    for x, y in product(configs, repeat=2):
        for mode in MODES:
            assert matrix_element(x, y, small, mode) == matrix_element(x, y, padded, mode)


def test_build_diagonal_matrix(space_4_2, diagonal_table_4):
    """Тест диагонали (4,2) для таблицы h_pp = p."""
    matrix = build_ci_matrix(space_4_2, diagonal_table_4)
    assert matrix.diagonal().tolist() == [3.0, 4.0, 5.0, 5.0, 6.0, 7.0]
    assert matrix.max_abs == 7.0


def test_build_structure(space_4_2, diagonal_table_4):
    """Тест структуры: нули сохраняются, в строке ровно d элементов."""
    zero = IntegralTableBuilder(4).build()
    matrix = build_ci_matrix(space_4_2, zero)
    assert all(t.value == 0.0 for t in matrix.triplets)
    assert matrix.max_abs == 0.0
    assert matrix.row_structure_counts().tolist() == [sparsity(space_4_2)] * 6
    assert [(t.row, t.col) for t in matrix.triplets] == [
        (t.row, t.col) for t in build_ci_matrix(space_4_2, diagonal_table_4).triplets
    ]
    for t in matrix.triplets:
        assert t.row <= t.col
        assert excitation_degree(unrank(t.row, space_4_2), unrank(t.col, space_4_2)) <= 2


def test_build_matches_elements(random_table_factory):
    """Тест: плотная матрица совпадает с поэлементным вычислением."""
    params = SpaceParams(6, 3)
    table = random_table_factory(2, 6)
    matrix = build_ci_matrix(params, table)
    dense = matrix.to_dense()
    configs = list(configurations(params))
    for i, x in enumerate(configs):
        for j, y in enumerate(configs):
            assert dense[i, j] == matrix_element(x, y, table)
    assert np.array_equal(dense, dense.T)


def test_build_parallel_is_deterministic(random_table_factory):
    """Тест: параллельная сборка даёт тот же список троек."""
    params = SpaceParams(6, 3)
    table = random_table_factory(2, 6)
    sequential = build_ci_matrix(params, table, max_workers=1)
    parallel = build_ci_matrix(params, table, max_workers=3)
    assert parallel.triplets == sequential.triplets


def test_build_cap(random_table_factory):
    """Тест отказа при превышении ограничения размерности."""
    table = random_table_factory(0, 8)
    with pytest.raises(CapExceededError) as info:
        build_ci_matrix(SpaceParams(8, 4), table, max_dimension=50)
    assert info.value.cap_name == "max_ci_dimension"


def test_build_rejects_small_table(diagonal_table_4):
    """Тест отказа, если таблица не покрывает пространство."""
    with pytest.raises(SlaterError):
        build_ci_matrix(SpaceParams(6, 2), diagonal_table_4)


def test_h2_ground_energy(sample_fcidump):
    """Тест энергии основного состояния H2 в минимальном базисе."""
    from src.parsers.fcidump_parser import parse_fcidump

    table = parse_fcidump(sample_fcidump.read_text(encoding="utf-8"))
    matrix = build_ci_matrix(SpaceParams(4, 2), table)
    h11, h22 = -1.252477303, -0.4759344611
    j11, j22, k12 = 0.6757101548, 0.6985113194, 0.1809270452
    block = np.array([[2 * h11 + j11, k12], [k12, 2 * h22 + j22]])
    expected = np.linalg.eigvalsh(block)[0]
    assert np.linalg.eigvalsh(matrix.to_dense())[0] == pytest.approx(expected, abs=1e-9)
    assert expected + table.core_energy == pytest.approx(-1.1359957, abs=1e-6)


def test_matrix_element_polar_parts():
    """Тест полярных частей элемента."""
    element = MatrixElement(0, 1, -0.25)
    assert element.sign_bit == 1
    assert element.magnitude == 0.25
    assert MatrixElement(0, 1, 0.25).sign_bit == 0


def test_polar_encoding():
    """Тест полярного кодирования и ошибки квантования."""
    assert polar_encode(-1.0, 2.0, 4) == (1, 4)
    assert polar_decode(1, 4, 2.0, 4) == pytest.approx(-8 / 7)
    assert polar_encode(2.0, 2.0, 8) == (0, 127)
    assert polar_encode(0.3, 0.0, 8) == (0, 0)
    for value in np.linspace(-2.0, 2.0, 41):
        sign_bit, code = polar_encode(float(value), 2.0, 10)
        assert abs(polar_decode(sign_bit, code, 2.0, 10) - value) <= 2.0 / 511 / 2 + 1e-15
    with pytest.raises(SlaterError):
        polar_encode(1.0, 1.0, 1)


def test_quantization_error(space_4_2, diagonal_table_4):
    """Тест: ошибка квантования убывает с числом бит."""
    matrix = build_ci_matrix(space_4_2, diagonal_table_4)
    assert quantization_error(matrix, 4) >= quantization_error(matrix, 16)
    assert quantization_error(matrix, 16) <= matrix.max_abs / (2 ** 15 - 1) / 2 + 1e-15


if __name__ == "__main__":
    pytest.main([__file__, "-v"])
