def main():
    a = b = c = 0
    x, (y, z) = 1, (2, 3)
    a += x
    b -= y
    c *= z
    arr = [0, 0]
    arr[0], arr[1] = arr[1] + 1, arr[0] + 2
    print(a, b, c, arr)

main()
