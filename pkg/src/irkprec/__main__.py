import sys

from irkprec.cli import main

sys.exit(main())
