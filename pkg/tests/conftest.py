"""Shared pytest configuration for the polytangle test suite."""

import os

from hypothesis import settings

# Pin the environment before any polytangle module reads its settings
os.environ["POLYTANGLE_ENABLE_FILE_LOGGING"] = "false"
os.environ["POLYTANGLE_SEED"] = "20240229"
os.environ["POLYTANGLE_LOG_LEVEL"] = "WARNING"

settings.register_profile("polytangle", deadline=None, max_examples=50)
settings.load_profile("polytangle")
