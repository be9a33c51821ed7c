"""Quadratic residues inside arithmetic subsets of [1, p-1]: counts, sums and checks."""
