import sys

from hodgefl.cli import main

sys.exit(main())
