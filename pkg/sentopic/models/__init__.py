"""
Model parameterization and persistence
"""
