"""Information-theoretic private inference for quantized weight vectors."""

__version__ = "0.1.0"
