import os
from dotenv import load_dotenv

"""
    Load environment variables from .env file
"""

load_dotenv()

def str_to_bool(value: str) -> bool:
    return value.strip().lower() in ("true", "1", "yes", "on")

LOG_LEVEL = os.getenv("LOG_LEVEL", "INFO").upper()

MAX_WORKERS = int(os.getenv("MAX_WORKERS", 4))
SHOW_PROGRESS = bool(str_to_bool(os.getenv("SHOW_PROGRESS", "false")))

AIRY_SERIES_RADIUS = float(os.getenv("AIRY_SERIES_RADIUS", 6.0))

NEWTON_MAX_ITER = int(os.getenv("NEWTON_MAX_ITER", 100))
NEWTON_TOL = float(os.getenv("NEWTON_TOL", 1e-11))

QUAD_TOL = float(os.getenv("QUAD_TOL", 1e-10))
POLE_TOL = float(os.getenv("POLE_TOL", 1e-13))

DEFAULT_N_MIN = int(os.getenv("DEFAULT_N_MIN", -3))
DEFAULT_N_MAX = int(os.getenv("DEFAULT_N_MAX", 9))

OUTPUT_DIR = str(os.getenv("OUTPUT_DIR", "out"))
