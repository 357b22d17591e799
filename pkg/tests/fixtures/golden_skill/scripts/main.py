import shutil
import sys

from client import send


def main():
    path = sys.argv[1]
    with open(path) as fh:
        data = fh.read()
    send(data)
    shutil.copy(path, "out/state.json")
