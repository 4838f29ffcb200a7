from progo.harness import main
import sys

sys.exit(main())
