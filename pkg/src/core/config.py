from contextlib import contextmanager

from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    # Logging
    LOG_LEVEL: str = "WARNING"
    LOG_FILE: str | None = None

    # Fan-out width for per-sample checks
    WORKERS: int = 4

    # Symbolic core
    PRUNE_TOL: float = 1e-14
    ROOT_CLUSTER_TOL: float = 1e-6
    MONIC_TOL: float = 1e-12
    UNIT_TOL: float = 1e-12
    ROOT_MAX_ITER: int = 500

    # Parabolicity checks
    ORTHO_TOL: float = 1e-10
    IM_FLOOR: float = 1e-7
    DELTA_FLOOR: float = 1e-9
    RANK_TOL: float = 1e-8
    NORMALIZATION_TOL: float = 1e-10

    # Sampling densities
    INTERIOR_SAMPLES: int = 5
    BOUNDARY_POINTS: int = 8
    TIME_VALUES: int = 3
    XI_DIRECTIONS: int = 16
    TANGENT_DIRECTIONS: int = 4
    ARC_POINTS: int = 16
    SAMPLING_SEED: int = 0

    # Hormander spaces
    SLOW_VARIATION_TOL: float = 0.05
    EDGE_DECAY_TOL: float = 1e-10
    DINI_RATIO: float = 0.95
    DINI_MAX_BLOCKS: int = 10
    DINI_DIVERGENCE_RUN: int = 8

    model_config = SettingsConfigDict(env_prefix="PARACHECK_", env_file="./env/.env")


settings = Settings()


@contextmanager
def override_settings(**values):
    """Temporarily replace settings fields; used for per-run CLI overrides."""
    unknown = sorted(set(values) - set(Settings.model_fields))
    if unknown:
        raise KeyError(", ".join(unknown))
    previous = {key: getattr(settings, key) for key in values}
    for key, value in values.items():
        setattr(settings, key, value)
    try:
        yield settings
    finally:
        for key, value in previous.items():
            setattr(settings, key, value)
