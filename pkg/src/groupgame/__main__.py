import sys

from groupgame.cli.main import main

sys.exit(main())
