"""File-backed helpers: class-number cache and CSV/JSON exports."""
