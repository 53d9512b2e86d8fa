import logging
import sys

from fairlie.config import settings
from fairlie.main import run_command

logger = logging.getLogger(__name__)

if __name__ == "__main__":
    logger.info("=" * 60)
    logger.info("fairlie: lying under egalitarian allocation")
    logger.info("=" * 60)
    logger.info(f"Version: {settings.ARTIFACT_VERSION}")
    logger.info(f"Reports: {settings.REPORT_DIR}")
    logger.info(f"Workers: {settings.WORKERS}")
    logger.info("=" * 60)

    try:
        code = run_command(sys.argv[1:])
    except KeyboardInterrupt:
        logger.info("Stopped by user")
        code = 130
    except Exception as e:
        logger.error(f"Unexpected error: {e}", exc_info=True)
        raise
    sys.exit(code)
