from pydantic_settings import BaseSettings, SettingsConfigDict


class AppSettings(BaseSettings):
    """
    Engine-wide settings, loadable from environment variables or a .env file.

    Every computation reads its limits from the global ``settings`` instance,
    so tests can tighten them with ``patch.object(settings, ...)``.
    """

    model_config = SettingsConfigDict(
        env_file=".env",
        env_file_encoding="utf-8",
        env_prefix="JORDANPLANE_",
        extra="ignore",
    )

    # Scalar field Q(zeta_N); mixing conductors is an error
    CONDUCTOR: int = 12
    EXPONENT_LIMIT: int = 10000

    # Symmetrizer caps: d=2 -> 4^6 = 4096 columns, d=3 -> 3^8 = 6561 columns
    MAX_DEGREE_DIM2: int = 12
    MAX_DEGREE_DIM3: int = 8
    MAX_SYMMETRIZER_SIZE: int = 4096
    MEMORY_HEADROOM: float = 0.5  # fraction of available RAM a matrix may claim

    # Rewriting
    REWRITE_DEGREE: int = 8
    MAX_COMPLETION_RULES: int = 500

    # Automorphism search for iso_classify
    AUT_ENTRY_BOUND: int = 3
    AUT_SEARCH_LIMIT: int = 200000

    # Monitoring
    ENABLE_METRICS: bool = False

    # Logging
    LOG_LEVEL: str = "WARNING"


# Global instance shared by all modules
settings = AppSettings()
