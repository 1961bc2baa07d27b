"""rulcast: release-cycle remaining-useful-life forecasting for software
performance, driven by fused fault/enhancement report data."""

__version__ = "0.1.0"
