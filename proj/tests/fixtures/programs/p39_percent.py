def main():
    price = 80.0
    discount = 0.25
    tax = 0.08
    final = price * (1 - discount) * (1 + tax)
    print(round(final, 2))

main()
