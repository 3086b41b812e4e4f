"""Exact level-structure calculus over higher local fields."""
