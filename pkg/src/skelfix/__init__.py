"""skelfix: repair buggy functions by abstracting and re-instantiating LLM patches."""

__version__ = "0.1.0"
