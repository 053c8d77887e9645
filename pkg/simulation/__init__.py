"""Simulation studies: type 1 error, power and p-value calibration."""
