from z3 import *


def main():
    x, y = Ints("x y")
    s = Solver()
    s.add(x + y == 10, x - y == 2)
    if s.check() == sat:
        m = s.model()
        print(m[x].as_long())
    else:
        print("Uncertain")


main()
