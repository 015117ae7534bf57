"""
Command Routes Package
"""
