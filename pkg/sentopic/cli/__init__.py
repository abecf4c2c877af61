"""
Command groups
"""
