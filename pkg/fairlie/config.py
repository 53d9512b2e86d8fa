import os
from pydantic_settings import BaseSettings


class Settings(BaseSettings):
    # Open interval (0, 100) is enforced as [EPSILON, UPPER_BOUND - EPSILON].
    EPSILON: float = 1e-6
    UPPER_BOUND: float = 100.0

    DEFAULT_R: float = 100.0
    SUM_TOLERANCE: float = 1e-9
    PUBLISHED_TOLERANCE: float = 0.06

    EXACT_BUDGET: int = 2 ** 24
    EXACT_CHUNK: int = 2 ** 16

    WORKERS: int = 1

    TOP_K: int = 3
    LEVELS: int = 100

    LOG_LEVEL: str = "INFO"
    ARTIFACT_VERSION: str = "1.0.0"

    _BASE_DIR = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
    REPORT_DIR: str = os.path.join(_BASE_DIR, "reports")
    DATA_DIR: str = os.path.join(_BASE_DIR, "data")

    class Config:
        env_file = ".env"
        env_file_encoding = "utf-8"
        env_prefix = "FAIRLIE_"
        case_sensitive = True


settings = Settings()


def lower_bound() -> float:
    return settings.EPSILON


def upper_bound() -> float:
    return settings.UPPER_BOUND - settings.EPSILON


def ensure_directories():
    os.makedirs(settings.REPORT_DIR, exist_ok=True)
