"""
Least-squares Fitting
"""
