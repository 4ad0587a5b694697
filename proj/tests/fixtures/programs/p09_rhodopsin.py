import numpy as np
def molecular_motion(temperature):
    error_rate = np.poly1d([1, 0])(temperature)
    return error_rate
temperatures = np.array(range(0, 100))
error_rates = molecular_motion(temperatures)
consistent_statement_1 = False
consistent_statement_2 = True
consistent_statement_3 = False
consistent_statement_4 = False
print(f"Consistent with Statement 2: {consistent_statement_2}")
