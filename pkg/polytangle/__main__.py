import sys

from polytangle.main import main

sys.exit(main())
