"""Versioned prompt text assets. Load them through agents.prompts.load_template."""
