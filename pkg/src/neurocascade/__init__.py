"""Compile cascades of prime semiautomata into recurrent neural cascades and check them."""
__version__ = "0.1.0"
