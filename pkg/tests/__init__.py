"""Integration test package for django_ris_feedback."""
