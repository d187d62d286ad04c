"""Small helpers shared by the pipeline stages."""

import itertools
from collections.abc import Callable, Iterable, Iterator
from concurrent.futures import ThreadPoolExecutor


def ordered_map[T, R](fn: Callable[[T], R], items: Iterable[T], jobs: int = 1) -> Iterator[R]:
    """Apply ``fn`` to ``items`` with up to ``jobs`` threads, yielding results in input order.

    Items are consumed in windows of ``4 * jobs`` so that memory stays
    bounded for long streams.  The first exception raised by ``fn`` is
    propagated once its item is reached.

    Example:
        >>> list(ordered_map(lambda x: x * x, range(5), jobs=3))
        [0, 1, 4, 9, 16]
    """
    if jobs <= 1:
        yield from map(fn, items)
        return
    iterator = iter(items)
    with ThreadPoolExecutor(max_workers=jobs) as executor:
        while window := list(itertools.islice(iterator, 4 * jobs)):
            yield from executor.map(fn, window)
