"""Tests of the pypcl package."""
