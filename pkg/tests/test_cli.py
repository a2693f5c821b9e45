"""Тесты командной строки ci-sim."""

import io

import numpy as np
import pytest

from src.ci.formatter import ci_formatter
from src.core.metrics import get_metrics_collector
from src.core.validation import ValidationError, build_run_config
from src.handlers.cli_handlers import cmd_info, resolve_space
from src.handlers.error_handler import exit_code_for, handle_exception
from src.main import main


def _report(text: str) -> dict:
    """Строки `key: value` в словарь."""
    result = {}
    for line in text.splitlines():
        key, _, value = line.partition(": ")
        result[key] = value
    return result


@pytest.mark.parametrize(
    "n_o, n_e, dimension, sparsity",
    [(4, 2, 6, 6), (6, 3, 20, 19), (3, 3, 1, 1)],
)
def test_info_examples(n_o, n_e, dimension, sparsity, capsys):
    """Тест команды info: размерность и разреженность."""
    code = main(["info", "--orbitals", str(n_o), "--electrons", str(n_e)])
    report = _report(capsys.readouterr().out)
    assert code == 0
    assert report["tool"] == "ci-sim"
    assert report["dimension"] == str(dimension)
    assert report["sparsity"] == str(sparsity)
    assert report["config.orbitals"] == str(n_o)


def test_info_registers():
    """Тест ширины регистров и числа цветов в info."""
    result = cmd_info(build_run_config(command="info", orbitals=4, electrons=2))
    report = _report(result.stdout)
    assert report["register.occupation_bits"] == "4"
    assert report["register.rank_bits"] == "3"
    assert report["descriptor_colors.total"] == "10"
    assert report["descriptor_colors.per_node"] == "6"
    assert report["neighbors.single"] == "4"
    assert report["neighbors.double"] == "1"


def test_info_from_fcidump(sample_fcidump, capsys):
    """Тест: параметры пространства берутся из заголовка FCIDUMP."""
    code = main(["info", "--integrals", str(sample_fcidump)])
    report = _report(capsys.readouterr().out)
    assert code == 0
    assert report["dimension"] == "6"
    assert report["config.orbitals"] == "4"
    assert report["config.electrons"] == "2"


def test_fcidump_flag_conflict(sample_fcidump, capsys):
    """Тест: --orbitals, противоречащий NORB, даёт код 2."""
    code = main(["info", "--integrals", str(sample_fcidump), "--orbitals", "6"])
    assert code == 2
    assert "error:" in capsys.readouterr().err


def test_malformed_fcidump_exit_code(tmp_path, capsys):
    """Тест кода 2 для повреждённого FCIDUMP."""
    path = tmp_path / "bad.fcidump"
    path.write_text("&FCI NORB=2, NELEC=2, MS2=0,\n&END\n0.5 1 1 0\n", encoding="utf-8")
    code = main(["matrix", "--integrals", str(path)])
    assert code == 2
    assert "строка 3" in capsys.readouterr().err


def test_non_utf8_fcidump_exit_code(tmp_path, capsys):
    """Тест кода 2 для FCIDUMP не в кодировке UTF-8."""
    path = tmp_path / "bad.fcidump"
    path.write_bytes(b"&FCI NORB=2, NELEC=2, MS2=0,\n&END\n\xff\xfe 1 1 1 1\n")
    code = main(["info", "--integrals", str(path)])
    assert code == 2
    assert "строка 3" in capsys.readouterr().err


def test_non_finite_fcidump_exit_code(tmp_path, capsys):
    """Тест кода 2 для NaN в FCIDUMP."""
    path = tmp_path / "nan.fcidump"
    path.write_text("&FCI NORB=2, NELEC=2, MS2=0,\n&END\nnan 1 1 0 0\n", encoding="utf-8")
    code = main(["matrix", "--integrals", str(path), "--format", "report"])
    assert code == 2
    assert "строка 3" in capsys.readouterr().err


def test_cap_exit_code(capsys):
    """Тест кода 3 при превышении ограничения размерности."""
    code = main([
        "matrix", "--orbitals", "8", "--electrons", "4", "--synthetic", "random", "--max-dimension", "50",
    ])
    assert code == 3
    assert "max_ci_dimension" in capsys.readouterr().err


@pytest.mark.parametrize(
    "argv",
    [
        ["info", "--orbitals", "4"],
        ["matrix", "--orbitals", "4", "--electrons", "2"],
        ["info", "--orbitals", "2", "--electrons", "3"],
        ["evolve", "--orbitals", "4", "--electrons", "2", "--synthetic", "diagonal", "--order", "3"],
        ["bogus"],
    ],
)
def test_usage_errors(argv, capsys):
    """Тест кода 2 для ошибок ввода."""
    assert main(argv) == 2


def test_matrix_triplets_to_stdout(capsys):
    """Тест экспорта троек в stdout по умолчанию."""
    code = main(["matrix", "--orbitals", "4", "--electrons", "2", "--synthetic", "diagonal"])
    lines = capsys.readouterr().out.splitlines()
    assert code == 0
    assert lines[0] == "# 4 2 6"
    assert len(lines) == 22


def test_matrix_output_file(tmp_path, capsys):
    """Тест записи троек в файл и отчёта в stdout."""
    target = tmp_path / "out" / "h.txt"
    code = main([
        "matrix", "--orbitals", "4", "--electrons", "2", "--synthetic", "diagonal", "--output", str(target),
    ])
    report = _report(capsys.readouterr().out)
    assert code == 0
    assert target.read_text(encoding="utf-8").startswith("# 4 2 6\n")
    assert float(report["ground_energy"]) == pytest.approx(3.0)
    assert report["triplets"] == "21"
    assert [p.name for p in target.parent.iterdir()] == ["h.txt"]


def test_matrix_fcidump_ground_energy(sample_fcidump, capsys):
    """Тест энергии основного состояния H2 в отчёте."""
    code = main(["matrix", "--integrals", str(sample_fcidump), "--format", "report", "--value-bits", "8"])
    report = _report(capsys.readouterr().out)
    assert code == 0
    assert report["polar.value_bits"] == "8"
    assert float(report["polar.max_quantization_error"]) <= float(report["max_abs"]) / 127 / 2 + 1e-15
    assert float(report["ground_energy"]) == pytest.approx(-1.1359958, abs=1e-6)
    assert float(report["core_energy"]) == pytest.approx(0.7137539936)
    assert float(report["metrics.counter.commands.matrix"]) >= 1


def test_color_report(capsys):
    """Тест команды color в формате отчёта."""
    code = main([
        "color", "--orbitals", "4", "--electrons", "2", "--synthetic", "random", "--format", "report",
    ])
    report = _report(capsys.readouterr().out)
    assert code == 0
    assert report["terms"] == "10"
    assert report["colors.single"] == "6"
    assert report["colors.double"] == "3"


def test_verify_labels_descriptor(capsys):
    """Тест: схема дескрипторов правильная на (8,4)."""
    code = main(["verify-labels", "--orbitals", "8", "--electrons", "4", "--scheme", "descriptor"])
    report = _report(capsys.readouterr().out)
    assert code == 0
    assert report["violations"] == "0"
    assert report["status"] == "ok"


def test_verify_labels_strict_formulas(capsys):
    """Тест: расхождения формул приводят к коду 4 только с --strict-formulas."""
    code = main(["verify-labels", "--orbitals", "4", "--electrons", "2", "--scheme", "pairlabel"])
    report = _report(capsys.readouterr().out)
    assert code == 0
    assert report["formula.mismatches"] == "5"
    assert report["mismatch.0"] == "3 6 1 formula=1,1 oracle=2,1"

    strict = main([
        "verify-labels", "--orbitals", "4", "--electrons", "2", "--scheme", "pairlabel", "--strict-formulas",
    ])
    assert strict == 4
    assert _report(capsys.readouterr().out)["status"] == "failed"


def test_evolve_diagonal(capsys):
    """Тест эволюции с диагональным гамильтонианом: совпадение с эталоном."""
    code = main([
        "evolve", "--orbitals", "4", "--electrons", "2", "--synthetic", "diagonal",
        "--time", "1.5", "--steps", "3", "--initial", "1,4",
    ])
    report = _report(capsys.readouterr().out)
    assert code == 0
    assert report["evolution.status"] == "completed"
    assert float(report["evolution.fidelity"]) == pytest.approx(1.0, abs=1e-12)
    assert float(report["evolution.error_vs_reference"]) < 1e-12


def test_evolve_state_file_round_trip(tmp_path, capsys):
    """Тест: состояние из --output читается через --initial-state."""
    first = tmp_path / "psi.txt"
    base = ["evolve", "--orbitals", "4", "--electrons", "2", "--synthetic", "random", "--seed", "3"]
    assert main(base + ["--time", "0.5", "--steps", "10", "--output", str(first)]) == 0
    lines = first.read_text(encoding="utf-8").splitlines()
    assert len(lines) == 6

    second = tmp_path / "psi2.txt"
    code = main(base + ["--time", "0.0", "--initial-state", str(first), "--output", str(second)])
    assert code == 0
    before = ci_formatter.parse_state(first.read_text(encoding="utf-8"), 6)
    after = ci_formatter.parse_state(second.read_text(encoding="utf-8"), 6)
    assert np.max(np.abs(before.amplitudes - after.amplitudes)) < 1e-14
    capsys.readouterr()


def test_evolve_convergence(capsys):
    """Тест отчёта о сходимости."""
    code = main([
        "evolve", "--orbitals", "4", "--electrons", "2", "--synthetic", "random",
        "--time", "0.5", "--steps", "8", "--order", "2", "--convergence",
    ])
    report = _report(capsys.readouterr().out)
    assert code == 0
    assert "evolution.convergence.3.error" in report
    assert float(report["evolution.convergence_slope"]) == pytest.approx(2.0, abs=0.5)


def test_resolve_space_synthetic_rounds_up():
    """Тест: случайная таблица для нечётного n_o строится на чётном числе спин-орбиталей."""
    params, table = resolve_space(build_run_config(command="matrix", orbitals=5, electrons=2, synthetic="random"))
    assert params.n_o == 5
    assert table.n_so == 6


def test_exit_code_mapping(capsys):
    """Тест таблицы кодов завершения."""
    from src.ci.coloring import ImproperColoringError, SingleDescriptor
    from src.core.validation import CapExceededError, NumericalCheckError, ValidationError

    assert exit_code_for(CapExceededError("x", 1, 2)) == 3
    assert exit_code_for(NumericalCheckError("x")) == 4
    assert exit_code_for(ImproperColoringError(1, SingleDescriptor(1, 2), 2, 3)) == 4
    assert exit_code_for(ValidationError("x")) == 2
    assert exit_code_for(RuntimeError("x")) is None
    with pytest.raises(RuntimeError):
        handle_exception(RuntimeError("boom"))


def test_error_counters_reach_metrics_summary():
    """Тест: счётчики ошибок попадают в сводку метрик."""
    metrics = get_metrics_collector()
    before = metrics.counter("errors.validation")
    assert handle_exception(ValidationError("x"), stream=io.StringIO()) == 2
    assert metrics.get_summary()["counter.errors.validation"] == before + 1


if __name__ == "__main__":
    pytest.main([__file__, "-v"])
