def stats(*values, scale=1, **extra):
    lo, hi = min(values), max(values)
    return {"lo": lo * scale, "hi": hi * scale, **extra}


def main():
    nums = [4, 8, 15, 16, 23, 42]
    print(stats(*nums, scale=2, tag="x"))

main()
