import sys

from scatternet.harness.cli import main

sys.exit(main())
