# colorlab/config.py
"""
Runtime settings for colorlab pipelines
Only COLORLAB_BUDGET is read from the environment; everything else is a
module constant that config files and CLI flags may override per run.
"""
import os
from fractions import Fraction
from pathlib import Path

from dotenv import load_dotenv
from loguru import logger

load_dotenv()

PROJECT_ROOT = Path(__file__).parent.parent
CONFIG_DIR = PROJECT_ROOT / "config"
DOCS_DIR = PROJECT_ROOT / "docs"
REPRODUCE_PRESET = CONFIG_DIR / "reproduce.yaml"

DEFAULT_SA_BUDGET = 200_000

# Exhaustive hypergraph matching / set packing limit (hyperedges)
MU_EXHAUSTIVE_LIMIT = 24
# DFS colorful matching limit (edges)
ILP_EDGE_LIMIT = 26
# Largest LP (variables) whose vertex certificate is rank-checked with sympy
CERTIFY_MAX_VARS = 80

DEFAULT_EPS = Fraction(1, 100)


def _read_budget() -> int:
    raw = os.getenv("COLORLAB_BUDGET", str(DEFAULT_SA_BUDGET))
    try:
        budget = int(raw)
    except ValueError:
        logger.warning(f"⚠️ COLORLAB_BUDGET={raw!r} is not an integer, using {DEFAULT_SA_BUDGET}")
        return DEFAULT_SA_BUDGET
    if budget <= 0:
        logger.warning(f"⚠️ COLORLAB_BUDGET must be positive, using {DEFAULT_SA_BUDGET}")
        return DEFAULT_SA_BUDGET
    return budget


SA_BUDGET = _read_budget()


def get_sa_budget(override: int = None) -> int:
    """
    Resolve the SA lifted-variable budget

    Args:
        override: Explicit budget from a flag or config file

    Returns:
        The override when given, otherwise the environment/default budget
    """
    if override is not None:
        return override
    return SA_BUDGET
