import sys

from photonsim.cli import main

sys.exit(main())
