"""
Operation metrics for fracmat.

Records call counts, failures and latencies of the instrumented public
operations (operator application, oracle evaluation, verification suites).
The CLI uses the collected latencies for the report's timing block and logs
the summary under --verbose.

Thread Safety:
    MetricsCollector guards its state with a threading.Lock, so instrumented
    operations may run inside the parallel helpers.

Usage:
    from fracmat.observability import get_metrics, instrument

    @instrument
    def apply_scalar(op, f):
        ...

    print(get_metrics().get_summary())
"""

from __future__ import annotations

import functools
import threading
import time
from collections.abc import Callable
from dataclasses import dataclass, field
from typing import Any, TypeVar

from fracmat.logging_config import get_logger

logger = get_logger(__name__)

F = TypeVar("F", bound=Callable[..., Any])

# Calls slower than this are logged at DEBUG
SLOW_CALL_SECONDS = 5.0


@dataclass
class OperationMetrics:
    """Metrics for a single operation.

    Attributes:
        call_count: Total number of calls
        success_count: Calls that returned normally
        failure_count: Calls that raised
        latencies: Latency samples in seconds
    """

    call_count: int = 0
    success_count: int = 0
    failure_count: int = 0
    latencies: list[float] = field(default_factory=list)

    @property
    def total_seconds(self) -> float:
        """Sum of all latency samples."""
        return sum(self.latencies)

    @property
    def avg_latency_ms(self) -> float:
        """Average latency in milliseconds."""
        if not self.latencies:
            return 0.0
        return (sum(self.latencies) / len(self.latencies)) * 1000

    @property
    def p50_latency_ms(self) -> float:
        """Median latency in milliseconds."""
        return self._percentile(50) * 1000

    @property
    def p95_latency_ms(self) -> float:
        """95th percentile latency in milliseconds."""
        return self._percentile(95) * 1000

    def _percentile(self, p: int) -> float:
        if not self.latencies:
            return 0.0
        ordered = sorted(self.latencies)
        k = (len(ordered) - 1) * (p / 100)
        lo = int(k)
        hi = min(lo + 1, len(ordered) - 1)
        if lo == hi:
            return ordered[lo]
        return ordered[lo] * (hi - k) + ordered[hi] * (k - lo)


class MetricsCollector:
    """Thread-safe collector of per-operation metrics.

    Example:
        collector = MetricsCollector()
        collector.record_call("apply_scalar", latency=0.012, success=True)
        print(collector.timing_table()["apply_scalar"]["calls"])
    """

    # Latency samples kept per operation
    MAX_LATENCY_SAMPLES = 10000

    def __init__(self) -> None:
        self._metrics: dict[str, OperationMetrics] = {}
        self._lock = threading.Lock()
        self._start_time = time.time()

    def record_call(self, name: str, latency: float, success: bool = True) -> None:
        """Record one call of an operation.

        Args:
            name: Operation name
            latency: Call latency in seconds
            success: Whether the call returned normally
        """
        with self._lock:
            metrics = self._metrics.setdefault(name, OperationMetrics())
            metrics.call_count += 1
            if success:
                metrics.success_count += 1
            else:
                metrics.failure_count += 1

            metrics.latencies.append(latency)
            if len(metrics.latencies) > self.MAX_LATENCY_SAMPLES:
                metrics.latencies = metrics.latencies[-self.MAX_LATENCY_SAMPLES :]

    def timing_table(self) -> dict[str, dict[str, float]]:
        """Per-operation call count and total seconds, sorted by name."""
        with self._lock:
            return {
                name: {"calls": m.call_count, "seconds": m.total_seconds}
                for name, m in sorted(self._metrics.items())
            }

    def reset(self) -> None:
        """Clear all metrics and restart the uptime clock."""
        with self._lock:
            self._metrics.clear()
            self._start_time = time.time()

    def get_summary(self) -> str:
        """Human-readable summary, busiest operations first."""
        with self._lock:
            if not self._metrics:
                return "No metrics collected yet."

            uptime = time.time() - self._start_time
            lines = [f"=== Operation metrics (uptime: {uptime:.1f}s) ===", ""]

            ordered = sorted(
                self._metrics.items(), key=lambda item: item[1].call_count, reverse=True
            )
            for name, m in ordered:
                lines.append(name)
                lines.append(
                    f"   Calls: {m.call_count} (ok {m.success_count}, failed {m.failure_count})"
                )
                if m.latencies:
                    lines.append(
                        f"   Latency: avg={m.avg_latency_ms:.1f}ms, "
                        f"p50={m.p50_latency_ms:.1f}ms, p95={m.p95_latency_ms:.1f}ms"
                    )
                lines.append("")

            return "\n".join(lines)


_metrics_collector: MetricsCollector | None = None
_metrics_collector_lock = threading.Lock()


def get_metrics() -> MetricsCollector:
    """Get the global metrics collector singleton."""
    global _metrics_collector

    if _metrics_collector is not None:
        return _metrics_collector

    with _metrics_collector_lock:
        if _metrics_collector is None:
            _metrics_collector = MetricsCollector()
        return _metrics_collector


def reset_metrics() -> None:
    """Reset the global metrics collector."""
    with _metrics_collector_lock:
        if _metrics_collector is not None:
            _metrics_collector.reset()


def instrument(func: F) -> F:
    """Decorator recording call count, latency and outcome of an operation.

    The operation name is the function's __name__.
    """

    @functools.wraps(func)
    def wrapper(*args: Any, **kwargs: Any) -> Any:
        name = func.__name__
        start = time.perf_counter()
        success = True
        try:
            return func(*args, **kwargs)
        except Exception:
            success = False
            raise
        finally:
            latency = time.perf_counter() - start
            get_metrics().record_call(name, latency=latency, success=success)
            if latency > SLOW_CALL_SECONDS:
                logger.debug(
                    "Slow operation: %s took %.2fs (success=%s)", name, latency, success
                )

    return wrapper  # type: ignore[return-value]
