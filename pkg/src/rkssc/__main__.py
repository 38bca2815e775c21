import sys

from rkssc.cli import main

sys.exit(main())
