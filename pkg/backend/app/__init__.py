"""
Multi-server coded caching simulator package
"""

__version__ = "0.1.0"
