"""
Core module initialization
"""

__version__ = "1.0.0"
__author__ = "Nielsen Realizability Team"
