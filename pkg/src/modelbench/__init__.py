"""modelbench: generate UML class diagrams from requirements with LLM backends
and evaluate them with dual LLM-judge / human-in-the-loop validation."""

__version__ = "0.1.0"
