from functools import lru_cache
from typing import Optional

from pydantic import BaseSettings, Field


class Settings(BaseSettings):
    """Runtime knobs, read from ``ANTICHAIN_*`` variables or a local ``.env``."""

    oracle_cap: int = Field(default=1 << 20, ge=1)
    check_invariants: bool = False
    default_timeout: Optional[float] = Field(default=None, ge=0)
    log_level: str = "WARNING"
    allowed_origins: str = "http://localhost:3000"

    class Config:
        env_prefix = "ANTICHAIN_"
        env_file = ".env"
        env_file_encoding = "utf-8"

    @property
    def origins(self) -> list[str]:
        return [o.strip() for o in self.allowed_origins.split(",") if o.strip()]


@lru_cache()
def get_settings() -> Settings:
    return Settings()
