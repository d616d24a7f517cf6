"""Ordered parallel map used for per-subject parallelism.

Results always come back in input order so that every file written downstream is
byte-identical regardless of ``jobs``.
"""

from collections.abc import Callable, Iterable
from concurrent.futures import ThreadPoolExecutor
from contextvars import copy_context
from typing import TypeVar

from fibrostage.core.logger.logger import get_logger

logger = get_logger("common.utils.parallel")

T = TypeVar("T")
R = TypeVar("R")


def ordered_map(func: Callable[[T], R], items: Iterable[T], jobs: int = 1) -> list[R]:
    """Apply ``func`` to every item, optionally on a thread pool, preserving order.

    numpy/scipy release the GIL in the heavy kernels, so threads give real speedups for
    per-subject work while keeping logging context (subject tags) intact: each call runs
    in a copy of the caller's context.

    Args:
        func: Function applied to each item
        items: Input items
        jobs: Worker count; ``1`` runs inline

    Returns:
        Results in the same order as ``items``
    """
    work = list(items)
    if jobs <= 1 or len(work) <= 1:
        return [func(item) for item in work]

    workers = min(jobs, len(work))
    logger.debug("Running %d items on %d threads", len(work), workers)
    with ThreadPoolExecutor(max_workers=workers, thread_name_prefix="fibrostage") as pool:
        futures = [pool.submit(copy_context().run, func, item) for item in work]
        return [future.result() for future in futures]
