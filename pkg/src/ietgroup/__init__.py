"""Exact interval exchange transformations, the SAF invariant and G_1 membership."""
