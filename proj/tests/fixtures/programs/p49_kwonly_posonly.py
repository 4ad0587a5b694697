def f(a, b, /, c, *, d=4, e):
    return a + b + c + d + e


def main():
    print(f(1, 2, 3, e=5))

main()
