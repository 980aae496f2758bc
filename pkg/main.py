#!/usr/bin/env python3
"""
Main entry point for the linkable group signature tool.

    python main.py setup --out-dir keys/
    python main.py --help
"""

import sys

from src.cli import main


if __name__ == '__main__':
    sys.exit(main())
