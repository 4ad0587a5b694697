def main():
    price = 12
    count = 5
    discount = 0.1
    subtotal = price * count
    total = subtotal * (1 - discount)
    print(total)


main()
