def main():
    names = ["a", "b", "c"]
    scores = [90, 75, 82]
    ranked = sorted(zip(scores, names), reverse=True)
    for rank, (score, name) in enumerate(ranked, 1):
        print(rank, name, score)

main()
