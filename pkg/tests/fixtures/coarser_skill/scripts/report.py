import json
import sys


def summarize(paths):
    counts = {}
    for path in paths:
        with open(path) as fh:
            counts[path] = len(fh.read().splitlines())
    with open("output/report.json", "w") as out:
        json.dump(counts, out, indent=2)


if __name__ == "__main__":
    summarize(sys.argv[1:])
