"""Residue counts inside arithmetic subsets."""
