"""
Core assembly routines for the System Model Service
"""
