import sys

from mazer.cli import main

sys.exit(main())
