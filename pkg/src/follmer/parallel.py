"""Worker-pool helpers. FOLLMER_THREADS caps parallelism everywhere."""

import os
from concurrent.futures import ThreadPoolExecutor


def worker_count() -> int:
    """Number of worker threads to use, capped by FOLLMER_THREADS."""
    cap = os.environ.get("FOLLMER_THREADS")
    avail = os.cpu_count() or 1
    if cap is None:
        return avail
    try:
        cap = int(cap)
    except ValueError:
        return avail
    return max(1, min(cap, avail))


def map_chunks(fn, chunks):
    """Apply fn to each chunk, in a thread pool when it pays off.

    Chunks carry their own RNG streams, so the result is identical for any
    degree of parallelism; order of the returned list follows the input.
    """
    workers = min(worker_count(), len(chunks))
    if workers <= 1 or len(chunks) <= 1:
        return [fn(c) for c in chunks]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, chunks))
