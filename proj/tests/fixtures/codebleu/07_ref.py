def main():
    options = {1: 12, 2: 15, 3: 18}
    target = 15
    for key, value in options.items():
        if value == target:
            print(key)
            return
    print(0)


main()
