class DogBehavior:
    def __init__(self, accustomed_reward, repetitions_until_disobey, responses_without_rewards, consistency_of_treatment):
        self.accustomed_reward = accustomed_reward
        self.repetitions_until_disobey = repetitions_until_disobey
        self.responses_without_rewards = responses_without_rewards
        self.consistency_of_treatment = consistency_of_treatment
    def evaluate_statement_based_on_behavior(self, statement_number):
        if statement_number == 1:
            return self.accustomed_reward
        elif statement_number == 2:
            return self.repetitions_until_disobey
        elif statement_number == 3:
            return self.responses_without_rewards
        elif statement_number == 4:
            return self.consistency_of_treatment
accustomed_reward = True
repetitions_until_disobey = 10
responses_without_rewards = False
consistency_of_treatment = False
dog_behavior = DogBehavior(accustomed_reward, repetitions_until_disobey, responses_without_rewards, consistency_of_treatment)
outcome_1 = dog_behavior.evaluate_statement_based_on_behavior(1)
outcome_2 = dog_behavior.evaluate_statement_based_on_behavior(2)
outcome_3 = dog_behavior.evaluate_statement_based_on_behavior(3)
outcome_4 = dog_behavior.evaluate_statement_based_on_behavior(4)
print(f"Evaluation of statement 1 leads to: {outcome_1}")
print(f"Evaluation of statement 2 leads to: {outcome_2}")
print(f"Evaluation of statement 3 leads to: {outcome_3}")
print(f"Evaluation of statement 4 leads to: {outcome_4}")
