def matmul(a, b):
    return [[sum(x * y for x, y in zip(row, col)) for col in zip(*b)] for row in a]


def main():
    a = [[1, 2], [3, 4]]
    b = [[5, 6], [7, 8]]
    print(matmul(a, b))

main()
