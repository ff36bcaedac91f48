"""Background workers that evaluate batch elements off the training thread."""

from __future__ import annotations

import queue
import threading
from concurrent.futures import Future
from typing import Callable, List, Sequence, Tuple, TypeVar

T = TypeVar("T")


class TapeWorker(threading.Thread):
    """Daemon thread running submitted callables one at a time.

    Each callable opens its own tape; the active tape is thread-local, so
    concurrent workers never record onto each other's tapes.
    """

    def __init__(self, name: str) -> None:
        super().__init__(name=name, daemon=True)
        self._tasks: "queue.Queue[Tuple[Callable[[], object], Future]]" = queue.Queue()
        self._stop_event = threading.Event()

    def run(self) -> None:
        """Execute submitted tasks sequentially."""
        while not self._stop_event.is_set():
            try:
                fn, fut = self._tasks.get(timeout=0.2)
            except queue.Empty:
                continue

            if fut.set_running_or_notify_cancel():
                try:
                    fut.set_result(fn())
                except Exception as e:
                    fut.set_exception(e)

    def submit(self, fn: Callable[[], T]) -> "Future[T]":
        fut: Future = Future()
        self._tasks.put((fn, fut))
        return fut

    def shutdown(self) -> None:
        self._stop_event.set()


class TapeWorkerPool:
    """Round-robin pool of `TapeWorker`s; with one worker, tasks run inline.

    Parameters
    ----------
    workers:
        Number of threads. 1 skips threading entirely.

    Notes
    -----
    `map` returns results in submission order regardless of completion order,
    which keeps gradient accumulation deterministic.
    """

    def __init__(self, workers: int = 1) -> None:
        if workers < 1:
            raise ValueError(f"workers must be >= 1, got {workers}.")
        self._workers: List[TapeWorker] = []
        if workers > 1:
            self._workers = [TapeWorker(name=f"tape-worker-{i}") for i in range(workers)]
            for worker in self._workers:
                worker.start()

    def __enter__(self) -> "TapeWorkerPool":
        return self

    def __exit__(self, *exc: object) -> None:
        self.shutdown()

    def map(self, tasks: Sequence[Callable[[], T]]) -> List[T]:
        """Run every task and return their results in order; the first failure is re-raised."""
        if not self._workers:
            return [task() for task in tasks]
        futures = [self._workers[i % len(self._workers)].submit(task) for i, task in enumerate(tasks)]
        return [fut.result() for fut in futures]

    def shutdown(self) -> None:
        """Stop all workers."""
        for worker in self._workers:
            worker.shutdown()
        for worker in self._workers:
            worker.join(timeout=1.0)
        self._workers = []
