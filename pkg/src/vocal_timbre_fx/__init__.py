"""Neural vocal timbre effects built on differentiable harmonic-plus-noise synthesis."""

__version__ = "0.1.0"

__all__ = [
    "main",
]
