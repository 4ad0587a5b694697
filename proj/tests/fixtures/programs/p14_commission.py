def commission(price, rate=0.05):
    return price * rate


def main():
    cars = [35000] * 10
    total = sum(commission(p) for p in cars)
    print(round(total))

main()
