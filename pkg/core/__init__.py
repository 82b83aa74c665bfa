"""
Fractional Fit Engine Core
Special functions, fractional operators and quadrature
"""
