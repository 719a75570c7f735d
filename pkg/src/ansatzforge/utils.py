"""Process-level parallelism helpers.

Restarts (and other embarrassingly parallel work) fan out over forked
worker processes; results are reduced in submission order so the outcome
is identical however many workers run.  The ANSATZFORGE_THREADS environment
variable caps the worker count (default: the machine's CPU count).
"""

from __future__ import annotations

import multiprocessing
import os

__all__ = ["resolve_workers", "run_parallel"]

_WORK = {}


def resolve_workers(requested: int | None, n_tasks: int) -> int:
    cap = os.environ.get("ANSATZFORGE_THREADS")
    try:
        cap = int(cap) if cap else (os.cpu_count() or 1)
    except ValueError:
        cap = 1
    cap = max(1, cap)
    if requested is not None:
        cap = min(cap, max(1, requested))
    return max(1, min(cap, n_tasks))


def _invoke(item):
    key, index = item
    fn, arg_tuples, catch = _WORK[key]
    try:
        return fn(*arg_tuples[index])
    except catch as exc:  # noqa: BLE001 - propagated as a value by design
        return exc


def run_parallel(fn, arg_tuples, workers: int = 1, catch=()) -> list:
    """Apply ``fn`` over argument tuples, optionally on forked workers.

    Exceptions of type ``catch`` are returned in place of results; results
    arrive in input order regardless of scheduling.
    """
    catch = catch or (_NeverRaised,)
    if workers <= 1 or len(arg_tuples) <= 1 or multiprocessing.get_start_method(allow_none=False) not in ("fork",):
        out = []
        for args in arg_tuples:
            try:
                out.append(fn(*args))
            except catch as exc:
                out.append(exc)
        return out
    key = object()
    _WORK[id(key)] = (fn, arg_tuples, catch)
    try:
        ctx = multiprocessing.get_context("fork")
        with ctx.Pool(processes=min(workers, len(arg_tuples))) as pool:
            return pool.map(_invoke, [(id(key), i) for i in range(len(arg_tuples))])
    finally:
        _WORK.pop(id(key), None)


class _NeverRaised(Exception):
    pass
