#!/usr/bin/env python3
"""
Main entry point for the road network classifier
"""

import sys

from roadnet.cli import main


if __name__ == "__main__":
    sys.exit(main())
