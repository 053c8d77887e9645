"""Special functions and compiled recursion kernels."""
