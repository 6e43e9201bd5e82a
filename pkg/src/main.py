import sys

from src.cli.router import run
from src.core.logger import logger


def main(argv: list[str] | None = None) -> int:
    logger.debug("Starting paracheck", argv=argv if argv is not None else sys.argv[1:])
    return int(run(argv))


def entrypoint() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entrypoint()
