"""
epsnet entry point.
"""
import sys
import logging

from config import LOG_FORMAT, LOG_LEVEL, LOGS_DIR, ensure_dirs

ensure_dirs()

# stdout carries reports, so console logging goes to stderr
logging.basicConfig(
    level=LOG_LEVEL,
    format=LOG_FORMAT,
    handlers=[
        logging.FileHandler(LOGS_DIR / 'epsnet.log', encoding='utf-8'),
        logging.StreamHandler(sys.stderr)
    ]
)

logger = logging.getLogger(__name__)


def main():
    """Main application entry point."""
    from cli import run

    try:
        code = run(sys.argv[1:])
    except KeyboardInterrupt:
        logger.info("Interrupted")
        code = 130
    sys.exit(code)


if __name__ == '__main__':
    main()
