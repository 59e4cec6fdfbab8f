"""Tests package for bundle_spectra."""
