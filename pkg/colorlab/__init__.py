# colorlab/__init__.py
"""
colorlab - exact-arithmetic laboratory for Bounded Color Matching relaxations
"""

__version__ = "0.4.0"
