def main():
    necklaces = 50
    broken = 3
    necklaces -= broken
    necklaces += 5
    necklaces -= 15
    print(necklaces)


if __name__ == "__main__":
    main()
