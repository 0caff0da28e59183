"""Helpers for running blocking work from asyncio code."""

import asyncio
from typing import Awaitable, Callable, Iterable, TypeVar

T = TypeVar("T")


async def gather_bounded(limit: int, jobs: Iterable[Callable[[], Awaitable[T]]]) -> list[T]:
    """Await ``jobs`` with at most ``limit`` running at once, keeping input order."""
    semaphore = asyncio.Semaphore(max(1, limit))

    async def _run(job: Callable[[], Awaitable[T]]) -> T:
        async with semaphore:
            return await job()

    return await asyncio.gather(*(_run(job) for job in jobs))
