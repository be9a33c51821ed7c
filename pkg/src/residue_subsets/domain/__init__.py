"""Value types and serializable reports."""
