import math


def main():
    r = 3
    area = math.pi * r ** 2
    print(round(area, 2))


main()
