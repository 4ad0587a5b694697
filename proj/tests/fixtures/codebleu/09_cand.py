def main(:
    hourly = 15
    print(hourly * 8 * 5
