"""
CLI routes package.
Each module registers one subcommand.
"""

# Routes are imported directly from their modules
# to avoid circular imports
