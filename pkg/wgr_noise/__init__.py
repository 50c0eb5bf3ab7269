"""
Thermal-noise floor of crystalline whispering-gallery resonators.
"""

__version__ = "0.1.0"
