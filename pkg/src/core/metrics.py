"""
Модуль метрик и мониторинга производительности.
"""

import threading
import time
from collections import defaultdict
from contextlib import contextmanager
from dataclasses import dataclass, field
from typing import Dict, Iterator, List, Optional

import psutil

from src.core.logging import get_logger

logger = get_logger(__name__)


@dataclass
class TimerStats:
    """Статистика по таймеру."""
    count: int = 0
    total: float = 0.0
    max: float = 0.0
    samples: List[float] = field(default_factory=list)

    @property
    def avg(self) -> float:
        """Среднее время."""
        return self.total / self.count if self.count else 0.0


class MetricsCollector:
    """Сборщик метрик."""

    def __init__(self, history_size: int = 1000):
        self.history_size = history_size
        self._counters: Dict[str, float] = defaultdict(float)
        self._timers: Dict[str, TimerStats] = defaultdict(TimerStats)
        self._started = time.perf_counter()
        self._peak_rss = 0

        # Блокировка для thread safety
        self._lock = threading.Lock()

    def increment(self, name: str, value: float = 1.0) -> None:
        """
        Увеличение счетчика.

        Args:
            name: Имя метрики
            value: Значение для увеличения
        """
        with self._lock:
            self._counters[name] += value

    def record_timer(self, name: str, duration: float) -> None:
        """
        Запись времени выполнения.

        Args:
            name: Имя метрики
            duration: Продолжительность в секундах
        """
        with self._lock:
            stats = self._timers[name]
            stats.count += 1
            stats.total += duration
            stats.max = max(stats.max, duration)
            stats.samples.append(duration)
            if len(stats.samples) > self.history_size:
                stats.samples = stats.samples[-self.history_size:]
        self._sample_memory()
        logger.debug(f"Timer {name}: {duration:.6f}s")

    @contextmanager
    def timer(self, name: str) -> Iterator[None]:
        """Контекстный менеджер для замера времени блока."""
        start = time.perf_counter()
        try:
            yield
        finally:
            self.record_timer(name, time.perf_counter() - start)

    def counter(self, name: str) -> float:
        """Текущее значение счетчика."""
        with self._lock:
            return self._counters.get(name, 0.0)

    def timer_stats(self, name: str) -> Optional[TimerStats]:
        """Статистика таймера или None."""
        with self._lock:
            return self._timers.get(name)

    def _sample_memory(self) -> None:
        """Обновляет пиковое значение RSS процесса."""
        try:
            rss = psutil.Process().memory_info().rss
        except psutil.Error:
            return
        with self._lock:
            self._peak_rss = max(self._peak_rss, rss)

    def get_summary(self) -> Dict[str, float]:
        """
        Сводка для отчёта.

        Returns:
            Словарь с прошедшим временем, пиковой памятью, таймерами и счётчиками
        """
        self._sample_memory()
        with self._lock:
            summary = {
                "elapsed_seconds": round(time.perf_counter() - self._started, 6),
                "peak_rss_mb": round(self._peak_rss / (1024 * 1024), 2),
            }
            for name, stats in sorted(self._timers.items()):
                summary[f"timer.{name}"] = round(stats.total, 6)
            for name, value in sorted(self._counters.items()):
                summary[f"counter.{name}"] = value
        return summary

    def reset(self) -> None:
        """Сброс всех метрик."""
        with self._lock:
            self._counters.clear()
            self._timers.clear()
            self._started = time.perf_counter()
            self._peak_rss = 0


# Глобальный экземпляр сборщика метрик
_metrics_collector: Optional[MetricsCollector] = None


def get_metrics_collector() -> MetricsCollector:
    """Получение глобального сборщика метрик."""
    global _metrics_collector
    if _metrics_collector is None:
        _metrics_collector = MetricsCollector()
    return _metrics_collector
