from actinwire.cli import main

raise SystemExit(main())
