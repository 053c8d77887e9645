"""Equal-local-levels bounds, global levels and local-level solving."""
