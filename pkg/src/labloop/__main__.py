import sys

from labloop.orchestrator.cli import main

sys.exit(main())
