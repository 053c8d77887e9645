"""Observation and bound-vector loading."""
