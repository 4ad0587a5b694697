def main():
    a = 0b1010
    b = 0x0F
    c = 0o17
    print(a & b, a | c, a ^ b, ~a, a << 2, b >> 1, 1_000_000, 3.5e-2, 2j)

main()
