"""Checkpoint score exporter for the calibration toolkit."""

from .export import ExportError, ExportJob, export_scores

__all__ = ["ExportError", "ExportJob", "export_scores"]
