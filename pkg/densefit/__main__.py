import sys

from densefit.main import main

sys.exit(main())
