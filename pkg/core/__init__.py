"""Numerical engines: least squares fits, masks, refinement, analysis, noise and LLR."""
