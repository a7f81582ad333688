"""Config-file adapter for cosmoent runs.

Load run options from a ``key=value`` file passed with ``--config``, producing a ``RunConfig``. Environment variables are never read, so a run is fully described by its argv plus that one file. Library callers use the models in ``cosmoent.config`` directly and never trigger file loading.
"""

from pydantic_settings import (
    BaseSettings,
    PydanticBaseSettingsSource,
    SettingsConfigDict,
)

from cosmoent.config import RunConfig


class FileSettings(RunConfig, BaseSettings):
    """A ``RunConfig`` populated from init kwargs (the CLI flags) and an optional key=value file.

    Keys are the ``RunConfig`` field names, case-insensitive; ``#`` starts a comment. Lists are written comma-separated, e.g. ``k=0.5,1,2``.
    """

    model_config = SettingsConfigDict(
        env_prefix="",
        extra="ignore",
        case_sensitive=False,
        env_file=None,
        env_file_encoding="utf-8",
        enable_decoding=False,
    )

    @classmethod
    def settings_customise_sources(
        cls,
        settings_cls: type[BaseSettings],  # ruff:ignore[unused-class-method-argument]
        init_settings: PydanticBaseSettingsSource,
        env_settings: PydanticBaseSettingsSource,  # ruff:ignore[unused-class-method-argument]
        dotenv_settings: PydanticBaseSettingsSource,
        file_secret_settings: PydanticBaseSettingsSource,  # ruff:ignore[unused-class-method-argument]
    ) -> tuple[PydanticBaseSettingsSource, ...]:
        """Read flags first, then the config file; skip the environment and secrets directories.

        Returns:
            tuple[PydanticBaseSettingsSource, ...]: The sources in priority order.
        """
        return init_settings, dotenv_settings
