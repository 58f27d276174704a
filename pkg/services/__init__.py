"""Report writing."""
