import sys

from cluster_cpd.cli import main

if __name__ == '__main__':
    sys.exit(main())
