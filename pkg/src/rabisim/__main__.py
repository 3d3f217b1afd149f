import sys

from rabisim.cli import main

sys.exit(main())
