"""
Tests module initialization
"""