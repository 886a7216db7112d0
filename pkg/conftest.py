"""
pytest entry point: the same SimpleTestCase suite also runs under pytest.
"""
import os
import sys

import django

# tests/manage.py runs with tests/ on the path, where testapp lives
sys.path.insert(0, os.path.join(os.path.dirname(os.path.abspath(__file__)), 'tests'))
os.environ.setdefault('DJANGO_SETTINGS_MODULE', 'tests.settings')


def pytest_configure():
    django.setup()
