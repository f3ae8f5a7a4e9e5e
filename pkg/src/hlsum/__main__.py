import sys

from hlsum.cli import main

sys.exit(main())
