"""layerlens: layer-wise embedding projection engine with uncertainty metrics."""

__version__ = "0.1.0"
