def load_state():
    with open("out/state.json") as fh:
        return fh.read()
