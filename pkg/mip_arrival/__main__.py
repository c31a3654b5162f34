from mip_arrival.cli import main

# When run from the command line, dispatches to the mip-arrival verbs. For example:
#   python -m mip_arrival gen counter --n 3 | python -m mip_arrival decide -
if __name__ == "__main__":
    raise SystemExit(main())
