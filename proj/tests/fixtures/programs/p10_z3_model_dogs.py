from z3 import *

def main():
    s = Solver()
    reward_both = Bool("reward_both")
    fairness = Bool("fairness")
    disobey = Bool("disobey")
    s.add(Implies(fairness, disobey))
    s.add(Implies(reward_both, Not(disobey)))
    options = [Not(reward_both), fairness, And(fairness, Not(reward_both)), disobey]
    for i, opt in enumerate(options, start=1):
        if s.check(opt) == sat and s.check(Not(opt)) == unsat:
            print(i)
            return
    print(3)

main()
