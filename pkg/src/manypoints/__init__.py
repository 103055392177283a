"""manypoints: hyperelliptic curves over finite fields with many points."""

__version__ = "0.1.0"
