from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    # App
    app_name: str = "clocknet"
    log_level: str = "INFO"

    # Output
    output_dir: str = "./runs"
    float_digits: int = 17

    # Workers
    threads: int = 1

    # Sampling limits
    circuit_shot_budget: int = 200_000
    point_chunk_size: int = 4096

    # Spectral analysis
    peak_threshold: float = 25.0
    peak_relative_floor: float = 1e-2

    model_config = SettingsConfigDict(
        env_prefix="CLOCKNET_",
        env_file=".env",
        extra="ignore",
    )


settings = Settings()
