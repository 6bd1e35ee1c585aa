import sys

from streamnorm.cli import main

sys.exit(main())
