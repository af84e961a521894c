from pydantic_settings import BaseSettings, SettingsConfigDict
from typing import Dict

class Settings(BaseSettings):
    # Finite field settings: irreducible modulus per degree n (bit i = coefficient of x^i)
    moduli: Dict[int, int] = {1: 0b11, 2: 0b111, 3: 0b1011, 4: 0b10011}
    max_degree: int = 4

    # Numerical tolerances
    exact_tolerance: float = 1e-10
    numeric_tolerance: float = 1e-8
    load_tolerance: float = 1e-6

    # Sampling and verification
    default_seed: int = 0
    verify_workers: int = 1
    exhaustive_net_limit: int = 10**6

    # Logging settings
    log_level: str = "INFO"

    # Configuration for loading from environment variables or .env file
    model_config = SettingsConfigDict(
        env_file=".env",
        env_file_encoding="utf-8",
        extra="ignore"
    )

settings = Settings()
