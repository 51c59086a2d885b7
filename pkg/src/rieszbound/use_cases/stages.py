"""Stage labelling shared by the pipeline use cases."""

from __future__ import annotations

import logging
import time
from contextlib import contextmanager
from typing import TYPE_CHECKING

from rieszbound.domain.exceptions import RieszBoundError, StageError

if TYPE_CHECKING:
    from collections.abc import Iterator

logger = logging.getLogger(__name__)


@contextmanager
def stage(name: str, timings: dict[str, float] | None = None) -> Iterator[None]:
    """Time a pipeline stage and label its failures.

    Domain errors raised inside become ``StageError(name, cause)``; an error
    already labelled by an inner stage passes through unchanged.
    """
    started = time.perf_counter()
    logger.debug('Stage %s started', name)
    try:
        yield
    except StageError:
        raise
    except (RieszBoundError, OSError) as e:
        raise StageError(name, e) from e
    finally:
        elapsed = time.perf_counter() - started
        if timings is not None:
            timings[name] = elapsed
        logger.debug('Stage %s finished in %.2fs', name, elapsed)
