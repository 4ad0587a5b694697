import sys; import math as m
def main(): x = 1; y = x + 1; print(m.sqrt(y), file=sys.stdout)
main()
