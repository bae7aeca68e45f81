"""
Combinatorial, parsing and rational helpers shared by every scheme.
"""

from app.utils.helpers import *  # noqa: F401, F403
