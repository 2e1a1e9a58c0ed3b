"""Heat-kernel escape-rate toolkit.

Classifies the convergence of rate-function integral tests, evaluates
potential-theory bounds (Green function, capacity, hitting and occupation
probabilities) for stable-like kernel models, simulates the underlying
processes with exact increments, and verifies the bounds by Monte Carlo.
"""

__version__ = "0.1.0"
