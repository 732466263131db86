import sys

from anomint.cli import main

sys.exit(main())
