"""Non-learned pipeline for video-based intake gesture detection."""

__version__ = "0.1.0"
