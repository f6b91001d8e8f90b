"""Staged pipeline: versioned artifacts, run manifests, and the CLI."""
