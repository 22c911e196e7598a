"""Configure Django so pytest can run the semirings test suite."""
import os

import django

os.environ.setdefault('DJANGO_SETTINGS_MODULE', 'thermo_sr.settings')
django.setup()
