"""Обработчики команд CLI."""

from dataclasses import dataclass
from pathlib import Path
from typing import Any, Dict, Optional, Tuple

from src.ci.coloring import (
    ColoringScheme,
    decompose,
    descriptor_color_count,
    mismatch_summary,
    verify_properness,
)
from src.ci.config_space import (
    SpaceParams,
    color_register_bits,
    encode,
    neighbor_count,
    register_widths,
    sparsity,
    unrank,
)
from src.ci.evolve import (
    StateVector,
    evolve,
    exact_reference,
    fidelity,
    ground_energy,
    measure_convergence,
    state_distance,
)
from src.ci.formatter import ci_formatter
from src.ci.integrals import IntegralTable, synthetic_table
from src.ci.slater import SignMode, SparseCiMatrix, build_ci_matrix, quantization_error
from src.core.config import settings
from src.core.constants import EXIT_NUMERICAL, EXIT_OK
from src.core.logging import get_logger
from src.core.metrics import get_metrics_collector
from src.core.validation import NumericalCheckError, RunConfig, ValidationError
from src.models.reports import EvolutionSummary
from src.parsers.fcidump_parser import FcidumpParser

logger = get_logger(__name__)

SYNTHETIC_KINDS = {"diagonal": "diagonal-one-body", "random": "random-symmetric"}

# Сколько нарушений и расхождений выводить в отчёт
REPORT_LIST_LIMIT = 20

# Число точек сетки шагов при --convergence
CONVERGENCE_POINTS = 4


@dataclass
class CommandResult:
    """Результат команды: код завершения, текст для stdout и файл для --output."""
    exit_code: int
    stdout: str
    artifact: Optional[str] = None


def _log_command_request(command: str, **context):
    """Логирует запуск команды с контекстом."""
    get_metrics_collector().increment(f"commands.{command}")
    logger.debug(f"Команда: {command}", extra={"extra_data": {"command": command, **context}})


def _log_command_success(command: str, **context):
    """Логирует успешное завершение команды."""
    logger.debug(f"Команда выполнена: {command}", extra={"extra_data": {"command": command, "status": "success", **context}})


def _log_command_failure(command: str, reason: str, **context):
    """Логирует отрицательный результат проверки."""
    get_metrics_collector().increment(f"checks_failed.{command}")
    logger.warning(
        f"Команда {command}: {reason}",
        extra={"extra_data": {"command": command, "status": "failed", "reason": reason, **context}},
    )


def resolve_space(cfg: RunConfig) -> Tuple[SpaceParams, Optional[IntegralTable]]:
    """
    Параметры пространства и таблица интегралов из FCIDUMP или синтетики.

    Raises:
        ValidationError: Флаги противоречат заголовку FCIDUMP
    """
    table: Optional[IntegralTable] = None
    n_o, n_e = cfg.orbitals, cfg.electrons

    if cfg.integrals:
        table = FcidumpParser(tolerance=settings.numerics.duplicate_tolerance).parse_file(cfg.integrals)
        if n_o is not None and n_o != table.n_so:
            raise ValidationError(
                f"--orbitals {n_o} не совпадает с NORB файла ({table.n_so} спин-орбиталей)"
            )
        if n_e is not None and n_e != table.n_electrons:
            raise ValidationError(f"--electrons {n_e} не совпадает с NELEC={table.n_electrons}")
        n_o, n_e = table.n_so, table.n_electrons
    elif cfg.synthetic:
        kind = SYNTHETIC_KINDS[cfg.synthetic]
        n_so = n_o + (n_o % 2) if kind == "random-symmetric" else n_o
        table = synthetic_table(kind, cfg.seed, n_so)

    return SpaceParams(n_o, n_e), table


def _config_section(cfg: RunConfig, params: SpaceParams) -> Dict[str, Any]:
    """Полная разрешённая конфигурация для отчёта."""
    data = cfg.model_dump()
    data["orbitals"] = params.n_o
    data["electrons"] = params.n_e
    return data


def _metrics_section() -> Dict[str, Any]:
    return get_metrics_collector().get_summary()


def _require_table(table: Optional[IntegralTable]) -> IntegralTable:
    if table is None:
        raise ValidationError("Требуется источник интегралов: --integrals или --synthetic")
    return table


def _build_matrix(cfg: RunConfig, params: SpaceParams, table: IntegralTable) -> SparseCiMatrix:
    matrix = build_ci_matrix(
        params,
        table,
        SignMode(cfg.sign_mode),
        max_dimension=cfg.max_dimension,
    )
    widest = int(matrix.row_structure_counts().max(initial=0))
    if widest > sparsity(params):
        raise NumericalCheckError(f"Строка содержит {widest} элементов при разреженности {sparsity(params)}")
    return matrix


def cmd_info(cfg: RunConfig) -> CommandResult:
    """Размерность, разреженность и счётчики соседей."""
    _log_command_request("info", orbitals=cfg.orbitals, electrons=cfg.electrons)
    params, _ = resolve_space(cfg)
    d = sparsity(params)
    occupation_bits, rank_bits = register_widths(params)
    sections = {
        "dimension": params.dimension,
        "sparsity": d,
        "neighbors": {
            "single": neighbor_count(params, 1),
            "double": neighbor_count(params, 2),
        },
        "descriptor_colors": {
            "per_node": d,
            "total": descriptor_color_count(params),
        },
        "register": {
            "occupation_bits": occupation_bits,
            "rank_bits": rank_bits,
            "color_bits": color_register_bits(params),
        },
        "pairlabel_color_bound": d * d,
    }
    _log_command_success("info", dimension=params.dimension, sparsity=d)
    return CommandResult(EXIT_OK, ci_formatter.format_report(sections, _config_section(cfg, params)))


def cmd_matrix(cfg: RunConfig) -> CommandResult:
    """Сборка CI-матрицы и экспорт троек."""
    _log_command_request("matrix", sign_mode=cfg.sign_mode)
    params, table = resolve_space(cfg)
    table = _require_table(table)
    matrix = _build_matrix(cfg, params, table)

    sections: Dict[str, Any] = {
        "dimension": matrix.dimension,
        "sparsity": sparsity(params),
        "triplets": len(matrix.triplets),
        "max_abs": matrix.max_abs,
        "core_energy": table.core_energy,
        "polar": {
            "value_bits": cfg.value_bits,
            "max_quantization_error": quantization_error(matrix, cfg.value_bits),
        },
    }
    dense_cap = cfg.dense_cap if cfg.dense_cap is not None else settings.limits.dense_reference_cap
    if matrix.dimension <= dense_cap:
        sections["ground_energy"] = ground_energy(matrix, dense_cap=dense_cap)
    sections["metrics"] = _metrics_section()

    report = ci_formatter.format_report(sections, _config_section(cfg, params))
    triplets = ci_formatter.format_triplets(matrix)
    _log_command_success("matrix", triplets=len(matrix.triplets))
    if cfg.format == "triplet" and not cfg.output:
        return CommandResult(EXIT_OK, triplets, triplets)
    return CommandResult(EXIT_OK, report, triplets)


def cmd_color(cfg: RunConfig) -> CommandResult:
    """Раскраска рёбер и разложение на одноразреженные слагаемые."""
    _log_command_request("color", scheme=cfg.scheme)
    params, table = resolve_space(cfg)
    table = _require_table(table)
    matrix = _build_matrix(cfg, params, table)
    scheme = ColoringScheme(cfg.scheme)
    terms = decompose(matrix, scheme)

    singles = sum(1 for term in terms if not term.is_diagonal and term.color.sort_key[0] == 1)
    sections = {
        "scheme": scheme.value,
        "dimension": matrix.dimension,
        "terms": len(terms),
        "colors": {
            "diagonal": 1,
            "single": singles,
            "double": len(terms) - 1 - singles,
        },
        "metrics": _metrics_section(),
    }
    export = ci_formatter.format_coloring(terms)
    _log_command_success("color", terms=len(terms))
    if cfg.format == "triplet" and not cfg.output:
        return CommandResult(EXIT_OK, export, export)
    return CommandResult(EXIT_OK, ci_formatter.format_report(sections, _config_section(cfg, params)), export)


def cmd_verify_labels(cfg: RunConfig) -> CommandResult:
    """
    Полная проверка правильности раскраски.

    Код 0, если нормативная раскраска правильная; расхождения формул
    приводят к ошибке только с --strict-formulas.
    """
    _log_command_request("verify-labels", scheme=cfg.scheme, strict=cfg.strict_formulas)
    params, _ = resolve_space(cfg)
    scheme = ColoringScheme(cfg.scheme)
    report = verify_properness(params, scheme, max_nodes=cfg.max_dimension)
    summary = mismatch_summary(report, limit=REPORT_LIST_LIMIT)

    sections: Dict[str, Any] = {
        "scheme": report.scheme,
        "dimension": params.dimension,
        "edges": report.edges,
        "total_colors": report.total_colors,
        "incident": {str(count): nodes for count, nodes in report.incident_distribution.items()},
        "violations": len(report.violations),
        "trio_violations": len(report.trio_violations),
        "proper": report.proper,
        "normative_proper": report.normative_proper,
    }
    for index, violation in enumerate(report.violations[:REPORT_LIST_LIMIT]):
        sections[f"violation.{index}"] = (
            f"{violation.node} {violation.color} {violation.neighbor_1} {violation.neighbor_2}"
        )
    if scheme != ColoringScheme.DESCRIPTOR:
        sections["formula"] = {
            "checked": summary["checked"],
            "mismatches": summary["total"],
            "class_1": summary["class_1"],
            "class_2": summary["class_2"],
        }
        for index, mismatch in enumerate(summary["first"]):
            sections[f"mismatch.{index}"] = (
                f"{mismatch.x} {mismatch.y} {mismatch.excitation_class} "
                f"formula={mismatch.formula[0]},{mismatch.formula[1]} "
                f"oracle={mismatch.oracle[0]},{mismatch.oracle[1]}"
            )

    exit_code = EXIT_OK
    if not report.normative_proper:
        exit_code = EXIT_NUMERICAL
        _log_command_failure("verify-labels", "раскраска неправильная", violations=len(report.violations))
    elif cfg.strict_formulas and report.formula_mismatches:
        exit_code = EXIT_NUMERICAL
        _log_command_failure("verify-labels", "формулы меток расходятся с подсчётом", mismatches=summary["total"])
    sections["status"] = "ok" if exit_code == EXIT_OK else "failed"
    sections["metrics"] = _metrics_section()

    text = ci_formatter.format_report(sections, _config_section(cfg, params))
    artifact = "".join(
        f"{m.x} {m.y} {m.excitation_class} {m.formula[0]} {m.formula[1]} {m.oracle[0]} {m.oracle[1]}\n"
        for m in report.formula_mismatches
    )
    return CommandResult(exit_code, text, artifact)


def _initial_state(cfg: RunConfig, params: SpaceParams) -> StateVector:
    """Начальное состояние: список орбиталей, файл или первая конфигурация."""
    if cfg.initial is not None:
        return StateVector.from_configuration(encode(cfg.initial, params), params)
    if cfg.initial_state is not None:
        path = Path(cfg.initial_state)
        if not path.is_file():
            raise ValidationError(f"Файл состояния не найден: {path}")
        return ci_formatter.parse_state(path.read_text(encoding="utf-8"), params.dimension)
    return StateVector.from_configuration(unrank(0, params), params)


def cmd_evolve(cfg: RunConfig) -> CommandResult:
    """Эволюция начального состояния и сравнение с точной эволюцией."""
    _log_command_request("evolve", order=cfg.order, steps=cfg.steps, time=cfg.time)
    params, table = resolve_space(cfg)
    table = _require_table(table)
    initial = _initial_state(cfg, params)
    matrix = _build_matrix(cfg, params, table)
    terms = decompose(matrix, ColoringScheme(cfg.scheme))

    summary = EvolutionSummary()
    final = evolve(terms, cfg.time, cfg.steps, cfg.order, initial, summary=summary)
    if summary.norm_drift > settings.numerics.norm_tolerance:
        raise NumericalCheckError(
            f"Дрейф нормы {summary.norm_drift:.3e} превышает {settings.numerics.norm_tolerance:.1e}"
        )

    dense_cap = cfg.dense_cap if cfg.dense_cap is not None else settings.limits.dense_reference_cap
    if matrix.dimension <= dense_cap:
        reference = exact_reference(matrix, cfg.time, initial, dense_cap=dense_cap)
        summary.fidelity = fidelity(final, reference)
        summary.error_vs_reference = state_distance(final, reference)
    if cfg.convergence:
        grid = [cfg.steps * 2 ** index for index in range(CONVERGENCE_POINTS)]
        result = measure_convergence(matrix, terms, cfg.time, cfg.order, grid, initial, dense_cap=dense_cap)
        summary.convergence = result.points
        summary.convergence_slope = result.slope

    sections: Dict[str, Any] = {
        "dimension": matrix.dimension,
        "scheme": cfg.scheme,
        "evolution": summary.to_dict(),
        "metrics": _metrics_section(),
    }
    _log_command_success("evolve", fidelity=summary.fidelity, norm_drift=summary.norm_drift)
    return CommandResult(
        EXIT_OK,
        ci_formatter.format_report(sections, _config_section(cfg, params)),
        ci_formatter.format_state(final),
    )


COMMANDS = {
    "info": cmd_info,
    "matrix": cmd_matrix,
    "color": cmd_color,
    "verify-labels": cmd_verify_labels,
    "evolve": cmd_evolve,
}
