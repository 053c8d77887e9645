"""Testing bands for Q-Q and P-P plots."""
