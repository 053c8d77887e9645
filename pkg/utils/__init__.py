"""Logging, errors and configuration shared by every package."""
