"""Interval-domain abstract interpretation and LLM reasoning-trace auditing."""

__version__ = "0.1.0"
