"""Utilities package for polytangle."""
