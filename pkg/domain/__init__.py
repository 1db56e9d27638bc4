"""Domain data: built-in sampled test functions."""
