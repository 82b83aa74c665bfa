"""
Parametric Models
"""
