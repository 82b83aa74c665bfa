"""
Dataset Ingestion
"""
