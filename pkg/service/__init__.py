"""
Fit Workflows and Reporting
"""
