import sys

from combspec.cli import main

sys.exit(main())
