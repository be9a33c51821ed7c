"""Identity and claim registry plus the range verification workflow."""
