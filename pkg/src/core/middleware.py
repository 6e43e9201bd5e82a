import functools
import time
from collections.abc import Callable

import pydantic

from src.core.constants import ExitStatus
from src.core.exceptions import InputError, ParacheckError
from src.core.logger import logger


def process_time(handler: Callable[..., ExitStatus]) -> Callable[..., ExitStatus]:
    """Measure and log command processing time."""

    @functools.wraps(handler)
    def wrapper(*args, **kwargs) -> ExitStatus:
        start_time = time.perf_counter()
        status = handler(*args, **kwargs)
        elapsed = time.perf_counter() - start_time
        logger.info(f"{handler.__name__} finished", status=int(status), seconds=elapsed)
        return status

    return wrapper


def catch_exceptions(
    handler: Callable[..., ExitStatus], on_error: Callable[[ParacheckError], None] | None = None
) -> Callable[..., ExitStatus]:
    """Map every exception raised by a command to its exit status."""

    def fail(exc: ParacheckError) -> ExitStatus:
        logger.error(exc.detail, **{k: str(v) for k, v in exc.context.items()})
        if on_error is not None:
            on_error(exc)
        return exc.exit_status

    @functools.wraps(handler)
    def wrapper(*args, **kwargs) -> ExitStatus:
        try:
            return handler(*args, **kwargs)
        except ParacheckError as exc:
            return fail(exc)
        except pydantic.ValidationError as exc:
            return fail(InputError(f"invalid input: {exc}"))
        except Exception as exc:
            logger.exception(exc, exc_info=True)
            return ExitStatus.INCONCLUSIVE

    return wrapper
