def main():
    points = 810
    a = points / 3
    b = a / 3
    c = points - a - b
    print(c)


main()
