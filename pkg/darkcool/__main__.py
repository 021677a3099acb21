# __main__.py
import sys

from darkcool.cli import main

if __name__ == "__main__":
    sys.exit(main())
