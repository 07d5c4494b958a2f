"""cauchylab: martingale tests, Monte Carlo and finite differences for local-volatility diffusions."""

__version__ = "0.1.0"
