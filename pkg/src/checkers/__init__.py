"""Feynman checkers and Young diagram step parity."""
