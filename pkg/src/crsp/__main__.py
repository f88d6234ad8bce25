import sys

from crsp.cli import main

sys.exit(main())
