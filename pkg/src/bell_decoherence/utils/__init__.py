"""
Utilities Module
Contains configuration, logging, and helper functions.
"""
