"""Primes, sieves and quadratic characters."""
