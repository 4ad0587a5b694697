def main():
    data = [3, 9, 1, 12, 7]
    if (n := len(data)) > 3:
        print(n)
    big = [y for x in data if (y := x * 2) > 10]
    print(big)

main()
