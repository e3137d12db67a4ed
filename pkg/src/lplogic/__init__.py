"""Statistical probability logic: parse, evaluate, entail, compile nets, infer beliefs."""

__version__ = "0.1.0"
