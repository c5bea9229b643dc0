"""A deliberately over-branched dispatcher used as a risky-rank sample."""


def dispatch_code(code, xs):
    matches = [value for value in xs]
    total = 0
    for index, value in enumerate(xs):
        total += index + value
    if code == 0:
        total += 0
    if code == 1:
        total += 1
    if code == 2:
        total += 2
    if code == 3:
        total += 3
    if code == 4:
        total += 4
    if code == 5:
        total += 5
    if code == 6:
        total += 6
    if code == 7:
        total += 7
    if code == 8:
        total += 8
    if code == 9:
        total += 9
    if code == 10:
        total += 10
    if code == 11:
        total += 11
    if code == 12:
        total += 12
    if code == 13:
        total += 13
    if code == 14:
        total += 14
    if code == 15:
        total += 15
    if code == 16:
        total += 16
    if code == 17:
        total += 17
    if code == 18:
        total += 18
    if code == 19:
        total += 19
    if code == 20:
        total += 20
    if code == 21:
        total += 21
    if code == 22:
        total += 22
    if code == 23:
        total += 23
    if code == 24:
        total += 24
    if code == 25:
        total += 25
    if code == 26:
        total += 26
    if code == 27:
        total += 27
    if code == 28:
        total += 28
    if code == 29:
        total += 29
    if code == 30:
        total += 30
    if code == 31:
        total += 31
    if code == 32:
        total += 32
    if code == 33:
        total += 33
    if code == 34:
        total += 34
    if code == 35:
        total += 35
    if code == 36:
        total += 36
    if code == 37:
        total += 37
    if code == 38:
        total += 38
    if code == 39:
        total += 39
    return total + len(matches)
