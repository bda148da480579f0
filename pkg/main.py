import sys

from runner import Runner

if __name__ == "__main__":
    runner = Runner()
    sys.exit(runner.main())
