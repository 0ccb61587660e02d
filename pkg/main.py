import sys

from dotenv import load_dotenv

# Load environment variables from .env if present
load_dotenv()

from qcollapse.cli import parse_and_dispatch  # noqa: E402

if __name__ == "__main__":
    sys.exit(parse_and_dispatch(sys.argv[1:]))
