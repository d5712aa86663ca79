#!/usr/bin/env python3
"""
Configuration module for the set-convergence toolkit
"""

import os
from dotenv import load_dotenv

load_dotenv()

# Output locations
OUTPUT_DIR = os.getenv("SETCONV_OUTPUT_DIR", "./output")
LOG_DIR = os.getenv("SETCONV_LOG_DIR", "./logs")
LOG_LEVEL = os.getenv("SETCONV_LOG_LEVEL", "INFO")

# Sampling limits
MAX_SAMPLES = int(os.getenv("SETCONV_MAX_SAMPLES", "4000000"))
MIN_RESOLVABLE_EPS = 1e-12

# Harness job pool
WORKERS = int(os.getenv("SETCONV_WORKERS", "4"))

# Default fidelities
DEFAULT_EPS = 1e-3
DEFAULT_REGION_EPS = 2e-2
DEFAULT_GRID_H = 1e-2
DEFAULT_TOL = 0.05

# Default windows (lo, hi per axis)
DEFAULT_WINDOW_1D = ((-1.0,), (1.0,))
DEFAULT_WINDOW_2D = ((-1.0, -1.0), (1.0, 1.0))
FIBER_WINDOW = ((-2.0, -2.0), (2.0, 2.0))
BOUNDARY_WINDOW = ((-1.5, -1.5), (1.5, 1.5))

# Default index lists
DEFAULT_N_LIST = [5, 10, 20, 40, 80]
COUNTEREXAMPLE_N_LIST = list(range(2, 101))
SAWTOOTH_N_LIST = [4, 8, 16, 32, 64]
NGON_N_LIST = [8, 32, 128]

# Regular-value guard: minimal admissible gradient norm on the limit fiber
REGULAR_VALUE_MIN_GRADIENT = 1e-3

# Experiment artifacts
CSV_FLOAT_FORMAT = "%.17g"
REPORT_FORMATS = ["csv", "json", "xlsx"]
