counter = 0


def bump():
    global counter
    counter += 1


def make_acc():
    total = 0

    def add(x):
        nonlocal total
        total += x
        return total
    return add


def main():
    bump()
    acc = make_acc()
    acc(3)
    print(counter, acc(4))

main()
