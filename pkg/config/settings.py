"""
Configuration settings for the realizability toolkit
Loads from .env file and provides validation
"""

import logging
from functools import lru_cache
from pathlib import Path
from dotenv import load_dotenv
from pydantic_settings import BaseSettings
from pydantic import Field, field_validator


# Load environment variables
env_path = Path(__file__).parent.parent / '.env'
load_dotenv(dotenv_path=env_path)


LOG_BASES = ("e", "2", "10")
HINGE_SCOPES = ("hub", "any")


class Settings(BaseSettings):
    """Toolkit settings with validation"""

    # Parallelism
    JOBS: int = Field(default=1)
    TRIAL_BLOCK_SIZE: int = 1000

    # Paths
    REPORTS_DIR: Path = Path("reports")
    LOGS_DIR: Path = Path("reports/logs")

    # Logging
    LOG_LEVEL: str = "WARNING"
    LOG_TO_FILE: bool = False
    LOG_BACKUP_COUNT: int = 30

    # Exact arithmetic thresholds
    EXACT_CUTOFF: int = 5000            # gf tables and odd-order sampler
    PARTITION_TABLE_CUTOFF: int = 600   # count-table descent for partitions

    # Prime threshold (log n)^2
    LOG_BASE: str = "e"

    # Standard-linear search
    SL_MAX_DEPTH: int = 6
    SL_NODE_BUDGET: int = 20000

    # Explicit groups
    MAX_GROUP_ORDER: int = 65536

    # CP2-tree catalog
    CATALOG_HINGE_SCOPE: str = "hub"

    class Config:
        env_prefix = "NRZ_"
        env_file = ".env"
        env_file_encoding = "utf-8"
        case_sensitive = False
        extra = "ignore"

    @field_validator("JOBS", "TRIAL_BLOCK_SIZE")
    @classmethod
    def validate_positive(cls, v):
        """Worker and block counts must be positive"""
        if v < 1:
            raise ValueError("JOBS and TRIAL_BLOCK_SIZE must be >= 1")
        return v

    @field_validator("LOG_LEVEL")
    @classmethod
    def validate_log_level(cls, v):
        """Level must be a name known to logging"""
        level = v.upper()
        if not isinstance(logging.getLevelName(level), int):
            raise ValueError(f"Unknown LOG_LEVEL {v}")
        return level

    @field_validator("EXACT_CUTOFF", "PARTITION_TABLE_CUTOFF")
    @classmethod
    def validate_cutoffs(cls, v):
        """Exact cutoffs below 10 would route trivial cases to float paths"""
        if v < 10:
            raise ValueError("Exact cutoffs must be >= 10")
        return v

    @field_validator("LOG_BASE")
    @classmethod
    def validate_log_base(cls, v):
        """Only natural, binary and decimal logs are supported"""
        if v not in LOG_BASES:
            raise ValueError(f"LOG_BASE must be one of {', '.join(LOG_BASES)}")
        return v

    @field_validator("SL_MAX_DEPTH")
    @classmethod
    def validate_depth(cls, v):
        """Search depth between 1 and 12"""
        if v < 1 or v > 12:
            raise ValueError("SL_MAX_DEPTH must be between 1 and 12")
        return v

    @field_validator("CATALOG_HINGE_SCOPE")
    @classmethod
    def validate_hinge_scope(cls, v):
        """Catalog convention"""
        if v not in HINGE_SCOPES:
            raise ValueError(f"CATALOG_HINGE_SCOPE must be one of {', '.join(HINGE_SCOPES)}")
        return v

    def __init__(self, **kwargs):
        super().__init__(**kwargs)
        if self.LOG_TO_FILE:
            self._create_directories()

    def _create_directories(self) -> None:
        """Create output directories if they don't exist"""
        self.REPORTS_DIR.mkdir(parents=True, exist_ok=True)
        self.LOGS_DIR.mkdir(parents=True, exist_ok=True)

    def resolve_output(self, name: str) -> Path:
        """Bare file names land in REPORTS_DIR; paths are kept as given"""
        path = Path(name)
        if path.parent == Path("."):
            self.REPORTS_DIR.mkdir(parents=True, exist_ok=True)
            return self.REPORTS_DIR / path
        return path

    def validate_for_experiments(self) -> None:
        """Validate configuration for Monte Carlo runs"""
        errors = []

        if self.PARTITION_TABLE_CUTOFF > self.EXACT_CUTOFF:
            errors.append("PARTITION_TABLE_CUTOFF cannot exceed EXACT_CUTOFF")

        if self.TRIAL_BLOCK_SIZE > 10**6:
            errors.append("TRIAL_BLOCK_SIZE above 10^6 defeats block-level parallelism")

        if self.SL_NODE_BUDGET < 100:
            errors.append("SL_NODE_BUDGET must be >= 100")

        if errors:
            raise ValueError(
                "Configuration validation failed:\n" +
                "\n".join(f"  - {e}" for e in errors)
            )


@lru_cache(maxsize=1)
def get_settings() -> Settings:
    """Process-wide settings instance"""
    return Settings()
