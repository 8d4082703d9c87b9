"""Data classes for locations, types, the IR and analysis results."""
