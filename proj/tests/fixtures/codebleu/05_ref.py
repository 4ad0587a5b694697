def main():
    rain = [2, 3, 5]
    total = 0
    for r in rain:
        total += r
    avg = total / len(rain)
    print(avg)


main()
