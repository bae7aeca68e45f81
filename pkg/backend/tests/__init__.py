"""
Test suite for the coded caching simulator.
"""
