"""Sliding pair iteration."""


def walk_pairs(xs):
    previous = None
    for x in xs:
        if previous is not None:
            yield previous, x
        previous = x
