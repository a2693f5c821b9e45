"""Точка входа CLI ci-sim."""

import argparse
import sys
from typing import List, Optional

from src.core.constants import EXIT_OK, TOOL_NAME, TOOL_VERSION
from src.core.logging import get_logger, set_level
from src.core.utils import atomic_write_text
from src.core.validation import build_run_config
from src.handlers.cli_handlers import COMMANDS, CommandResult
from src.handlers.error_handler import run_guarded

logger = get_logger(__name__)

# Поля RunConfig, которые заполняются из аргументов
CONFIG_FIELDS = (
    "orbitals", "electrons", "integrals", "synthetic", "seed", "scheme", "sign_mode",
    "time", "steps", "order", "initial", "initial_state", "output", "format",
    "strict_formulas", "convergence", "value_bits", "max_dimension", "dense_cap",
)


def _common_parser() -> argparse.ArgumentParser:
    """Общие флаги всех команд."""
    parser = argparse.ArgumentParser(add_help=False)
    space = parser.add_argument_group("пространство")
    space.add_argument("--orbitals", type=int, help="Число спин-орбиталей n_o")
    space.add_argument("--electrons", type=int, help="Число электронов n_e")

    source = parser.add_argument_group("интегралы")
    source.add_argument("--integrals", help="Путь к FCIDUMP файлу")
    source.add_argument("--synthetic", choices=["diagonal", "random"], help="Синтетическая таблица интегралов")
    source.add_argument("--seed", type=int, default=0, help="Зерно для --synthetic random")

    parser.add_argument("--scheme", choices=["descriptor", "pairlabel", "pairlabel-formula"], default="descriptor")
    parser.add_argument("--sign-mode", dest="sign_mode", choices=["fermionic", "paper-literal"], default="fermionic")
    parser.add_argument("--output", help="Файл для результата (запись атомарная)")
    parser.add_argument("--format", choices=["triplet", "report"], default="triplet")
    parser.add_argument("--value-bits", dest="value_bits", type=int, help="Бит на элемент в полярном коде (отчёт matrix)")
    parser.add_argument("--max-dimension", dest="max_dimension", type=int, help="Ограничение на размерность")
    parser.add_argument("--dense-cap", dest="dense_cap", type=int, help="Ограничение на плотный эталон")
    parser.add_argument("--log-level", dest="log_level", help="Уровень логирования (в stderr)")
    return parser


def build_parser() -> argparse.ArgumentParser:
    """Парсер аргументов командной строки."""
    common = _common_parser()
    parser = argparse.ArgumentParser(
        prog=TOOL_NAME,
        description="Разреженное представление полного КВ и симуляция формулами произведения",
    )
    parser.add_argument("--version", action="version", version=f"{TOOL_NAME} {TOOL_VERSION}")
    subparsers = parser.add_subparsers(dest="command", required=True)

    subparsers.add_parser("info", parents=[common], help="Размерность и разреженность")
    subparsers.add_parser("matrix", parents=[common], help="Сборка CI-матрицы")
    subparsers.add_parser("color", parents=[common], help="Раскраска и разложение")

    verify = subparsers.add_parser("verify-labels", parents=[common], help="Проверка правильности раскраски")
    verify.add_argument(
        "--strict-formulas",
        dest="strict_formulas",
        action="store_true",
        help="Считать расхождение формул меток ошибкой",
    )

    evolve = subparsers.add_parser("evolve", parents=[common], help="Эволюция состояния")
    evolve.add_argument("--time", type=float, default=1.0, help="Время (атомные единицы)")
    evolve.add_argument("--steps", type=int, default=1, help="Число шагов")
    evolve.add_argument("--order", type=int, default=2, help="Порядок формулы: 1 или чётный")
    evolve.add_argument("--initial", help="Занятые орбитали начального детерминанта, например 1,2")
    evolve.add_argument("--initial-state", dest="initial_state", help="Файл состояния `q re im`")
    evolve.add_argument("--convergence", action="store_true", help="Измерить порядок сходимости")
    return parser


def run_command(args: argparse.Namespace) -> int:
    """Валидация, выполнение команды и вывод результата."""
    values = {name: getattr(args, name) for name in CONFIG_FIELDS if getattr(args, name, None) is not None}
    cfg = build_run_config(command=args.command, **values)

    result: CommandResult = COMMANDS[cfg.command](cfg)
    if cfg.output and result.artifact is not None:
        atomic_write_text(cfg.output, result.artifact)
        logger.info(f"Результат записан: {cfg.output}")
    sys.stdout.write(result.stdout)
    sys.stdout.flush()
    return result.exit_code


def main(argv: Optional[List[str]] = None) -> int:
    """
    Запуск CLI.

    Returns:
        Код завершения: 0 успех, 2 ошибка ввода, 3 ограничение ресурсов, 4 численная проверка
    """
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code) if e.code is not None else EXIT_OK

    if args.log_level:
        set_level(args.log_level)

    return run_guarded(lambda: run_command(args))


if __name__ == "__main__":
    sys.exit(main())
