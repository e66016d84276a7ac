"""corpusforge: community-governed parallel-corpus construction platform."""

__version__ = "0.1.0"

from .runtime import Platform, open_platform, open_platform_from_env

__all__ = ["Platform", "open_platform", "open_platform_from_env", "__version__"]
