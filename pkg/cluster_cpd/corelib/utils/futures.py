import asyncio
import functools
import inspect

from collections.abc import Awaitable, Callable
from typing import ParamSpec, TypeVar

P = ParamSpec('P')
R = TypeVar('R')


def asyncify(func: Callable[P, R]) -> Callable[P, Awaitable[R]]:
    '''Wrap a blocking callable so every call runs on a worker thread.

    numpy and scipy release the GIL inside their kernels, so offloaded
    solver runs overlap in practice.
    '''

    @functools.wraps(func)
    async def offloaded(*args: P.args, **kwargs: P.kwargs) -> R:
        return await asyncio.to_thread(func, *args, **kwargs)

    offloaded.__signature__ = inspect.signature(func)  # type: ignore[attr-defined]
    return offloaded


async def gather_bounded(
    factories: list[Callable[[], Awaitable[R]]],
    *,
    limit: int
) -> list[R]:
    '''Await coroutine factories with at most ``limit`` running at once.

    Results come back in the order of ``factories`` regardless of which
    finished first.

    Parameters
    ----------
    factories : list[Callable[[], Awaitable[R]]]
        Zero-argument callables producing the awaitables.
    limit : int
        Maximum number of concurrently running awaitables, at least 1.

    Returns
    -------
    list[R]
        _results in submission order_
    '''
    semaphore = asyncio.Semaphore(max(1, limit))

    async def _run(factory: Callable[[], Awaitable[R]]) -> R:
        async with semaphore:
            return await factory()

    return list(await asyncio.gather(*(_run(f) for f in factories)))
