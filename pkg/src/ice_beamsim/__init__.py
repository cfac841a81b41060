"""Location-assisted compressive-sensing beam alignment for mmWave links."""

__version__ = "0.1.0"
