"""Evaluation harness for text-to-image models: compositional scene
generation, detection-based skill scoring, and gender/skin-tone bias metrics.
"""

__version__ = "0.1.0"
