"""Reference distributions and parameter estimation."""
