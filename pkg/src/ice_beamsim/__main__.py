import sys

from ice_beamsim.harness.cli import main

sys.exit(main())
