"""Libraries for the liveness-based points-to analyzer."""

__version__ = '0.1.0'
