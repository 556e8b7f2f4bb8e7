"""Shared plumbing: seeded substreams and atomic file output."""

from __future__ import annotations

import os
import zlib
from contextlib import contextmanager
from pathlib import Path

import numpy as np


def substream(seed: int, name: str) -> np.random.Generator:
    """Independent generator derived from (seed, substream name).

    All randomness in the pipeline flows from one config seed through
    named substreams so runs are exactly reproducible.
    """
    return np.random.default_rng(
        np.random.SeedSequence([int(seed) & 0xFFFFFFFF, zlib.crc32(name.encode())])
    )


@contextmanager
def atomic_path(final: str | Path):
    """Yield a temp path, then rename over the target on success.

    Interrupted runs never leave a truncated file at the final location.
    """
    final = Path(final)
    tmp = final.parent / (final.name + ".part")
    try:
        yield tmp
    except BaseException:
        tmp.unlink(missing_ok=True)
        raise
    os.replace(tmp, final)
