"""Centralized configuration and environment loading for the endqt simulator."""

from __future__ import annotations

import logging
import os
from pathlib import Path

from dotenv import load_dotenv

logger = logging.getLogger(__name__)

BASE_DIR = Path(__file__).resolve().parent.parent
ENV_PATH = BASE_DIR / ".env"

# Load environment variables from .env if present; variables already set in
# the process environment win.
try:
    if ENV_PATH.exists():
        load_dotenv(dotenv_path=ENV_PATH)
    else:
        load_dotenv()
except PermissionError:
    logger.warning(
        "Unable to read %s due to permissions. Using existing environment variables.",
        ENV_PATH,
    )

# --- Numerical limits ---
DIMENSION_CAP = int(os.getenv("ENDQT_DIMENSION_CAP", "4096"))
if DIMENSION_CAP < 2:
    raise ValueError("ENDQT_DIMENSION_CAP must be at least 2.")

# D*_max - D* at or below this gap counts as completely differentiated.
COMPLETION_GAP = float(os.getenv("ENDQT_COMPLETION_GAP", "1e-6"))

# --- Bath defaults ---
BATH_SIZE = int(os.getenv("ENDQT_BATH_SIZE", "6"))
BATH_LOW = float(os.getenv("ENDQT_BATH_LOW", "0.5"))
BATH_HIGH = float(os.getenv("ENDQT_BATH_HIGH", "1.5"))
if BATH_LOW <= 0 or BATH_HIGH < BATH_LOW:
    raise ValueError("ENDQT_BATH_LOW/ENDQT_BATH_HIGH must satisfy 0 < low <= high.")

# --- Run defaults ---
DEFAULT_SEED = int(os.getenv("ENDQT_DEFAULT_SEED", "7"))
DEFAULT_TRIALS = int(os.getenv("ENDQT_DEFAULT_TRIALS", "10000"))
SELFTEST_TRIALS = int(os.getenv("ENDQT_SELFTEST_TRIALS", "2000"))
OUTPUT_DIR = str(Path(os.getenv("ENDQT_OUTPUT_DIR", str(BASE_DIR / "runs"))).resolve())

LOG_LEVEL = os.getenv("ENDQT_LOG_LEVEL", "INFO").upper()

TOOL_VERSION = "0.1.0"
