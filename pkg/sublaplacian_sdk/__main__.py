import sys

from sublaplacian_sdk.main import main

sys.exit(main())
