"""Integration tests for fibrostage.

This package contains end-to-end runs of the command line on synthetic phantom
cohorts, exercising registration, staging and evaluation together.
"""
