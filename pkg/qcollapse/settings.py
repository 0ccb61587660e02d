import logging
import os
from logging.handlers import RotatingFileHandler
from pathlib import Path

from dotenv import dotenv_values, load_dotenv

from qcollapse.errors import InvalidInput

load_dotenv()

LOG_DIR = os.getenv("QCOLLAPSE_LOG_DIR", os.path.join(os.getcwd(), "logs"))
LOG_LEVEL = os.getenv("QCOLLAPSE_LOG_LEVEL", "INFO").upper()
LOG_FORMAT = '%(asctime)s - %(name)s - %(levelname)s - %(message)s'
LOG_DATEFMT = '%Y-%m-%d %H:%M:%S'


def sweep_threads() -> int:
    raw = os.getenv("QCOLLAPSE_THREADS")
    if not raw:
        return os.cpu_count() or 1
    try:
        threads = int(raw)
    except ValueError as e:
        raise InvalidInput(f"QCOLLAPSE_THREADS must be an integer, got {raw!r}") from e
    if threads < 1:
        raise InvalidInput("QCOLLAPSE_THREADS must be at least 1")
    return threads


def setup_logging(quiet: bool = False, log_dir: str | None = None) -> logging.Logger:
    """Console handler plus a rotating DEBUG log file for the 'qcollapse' logger."""
    logger = logging.getLogger('qcollapse')
    logger.setLevel(logging.DEBUG)
    if logger.handlers:
        return logger

    formatter = logging.Formatter(LOG_FORMAT, datefmt=LOG_DATEFMT)

    console_handler = logging.StreamHandler()
    console_handler.setLevel(logging.WARNING if quiet else LOG_LEVEL)
    console_handler.setFormatter(formatter)
    logger.addHandler(console_handler)

    log_dir = log_dir or LOG_DIR
    try:
        os.makedirs(log_dir, exist_ok=True)
        file_handler = RotatingFileHandler(
            os.path.join(log_dir, 'qcollapse.log'),
            maxBytes=10_000_000,  # 10MB
            backupCount=5
        )
    except OSError as e:
        logger.warning(f"File logging disabled: {e}")
    else:
        file_handler.setLevel(logging.DEBUG)
        file_handler.setFormatter(formatter)
        logger.addHandler(file_handler)
    return logger


def load_config_file(path) -> dict[str, str]:
    """key=value pairs from a config file, keys normalised to option names."""
    path = Path(path)
    if not path.is_file():
        raise InvalidInput(f"config file not found: {path}")
    values = dotenv_values(path)
    return {key.strip().lower().replace("-", "_"): value for key, value in values.items() if value is not None}
