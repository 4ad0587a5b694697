def main():
    text = "  Hello, World  "
    cleaned = text.strip().lower().replace(",", "")
    parts = cleaned.split()
    print("-".join(reversed(parts)), cleaned.startswith("hello"))

main()
