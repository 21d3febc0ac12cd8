"""Order-preserving parallel map for entrywise and per-point evaluation."""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor, as_completed
from typing import TYPE_CHECKING, TypeVar

from fracmat.config import get_settings
from fracmat.logging_config import get_logger

if TYPE_CHECKING:
    from collections.abc import Callable, Sequence

logger = get_logger(__name__)

T = TypeVar("T")
R = TypeVar("R")


def parallel_map(
    func: Callable[[T], R],
    items: Sequence[T],
    max_workers: int | None = None,
) -> list[R]:
    """
    Apply func to every item on a bounded thread pool.

    Results come back in input order, so the output is identical to
    ``[func(item) for item in items]``. The first exception raised by any
    call is re-raised after the pool drains.

    Args:
        func: Pure function to apply
        items: Inputs
        max_workers: Pool size; defaults to runtime.max_workers

    Returns:
        List of results aligned with items
    """
    if not items:
        return []

    workers = max_workers if max_workers is not None else get_settings().runtime.max_workers
    workers = max(1, min(workers, len(items)))
    if workers == 1:
        return [func(item) for item in items]

    results: list[R | None] = [None] * len(items)
    errors: dict[int, BaseException] = {}

    with ThreadPoolExecutor(max_workers=workers, thread_name_prefix="fracmat_") as executor:
        future_to_idx = {executor.submit(func, item): idx for idx, item in enumerate(items)}
        for future in as_completed(future_to_idx):
            idx = future_to_idx[future]
            try:
                results[idx] = future.result()
            except Exception as exc:
                errors[idx] = exc

    if errors:
        first = min(errors)
        logger.debug("parallel_map: %d of %d calls failed", len(errors), len(items))
        raise errors[first]

    return results  # type: ignore[return-value]
