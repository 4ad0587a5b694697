def main():
    options = {
        1: "Fluoride-bearing minerals are not the primary source of fluoride found in groundwater.",
        2: "None of the above",
    }
    wet_years_more_active = True
    supports = {k: False for k in options}
    if wet_years_more_active:
        supports[2] = True
    answer = [k for k, v in supports.items() if v][0]
    print(answer)

main()
