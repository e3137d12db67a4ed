import sys

from lplogic.cli import main

sys.exit(main())
