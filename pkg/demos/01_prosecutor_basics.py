"""Walk through the basic objects on the two-state prosecutor fixture.

A prosecutor (sender) wants convictions; a judge (receiver) wants correct
verdicts. The defendant is guilty with prior probability 1/3. Always
claiming guilt is worthless: the judge would learn nothing and acquit.
The optimal committed policy claims guilt whenever the defendant is
guilty and exactly half the time when innocent, which makes the judge
indifferent at the "guilt" signal and (breaking ties toward the sender)
secures a conviction rate of 2/3.
"""

import numpy as np

from persuasion import (
    DirectScheme,
    audit,
    concavification_value,
    load_corpus,
    posterior,
    solve_exact,
)

instance = load_corpus("prosecutor")
print("states: innocent (2/3), guilty (1/3); actions: acquit, convict")

sol = solve_exact(instance)
print(f"\noptimal sender value: {sol.value:.6f}  (= 2/3)")
print("optimal scheme rows (acquit-signal, convict-signal):")
print(sol.scheme.phi)

ps = posterior(instance, sol.scheme, 1)
print(f"\nconvict signal fires with probability {ps.signal_prob:.6f}")
print(f"judge's posterior payoffs given it: {np.round(ps.receiver_posterior, 6)}")
print(f"judge's best response: action {ps.best_action} (convict; tie to sender)")

report = audit(instance, sol.scheme)
print(f"\naudit: value {report.sender_utility:.6f}, "
      f"min IC slack {report.min_slack:.2e}, is IC: {report.is_ic}")

naive = DirectScheme([[0.0, 1.0], [0.0, 1.0]])
naive_report = audit(instance, naive)
print(f"always-claim-guilt audit: certified relaxation needed "
      f"{naive_report.epsilon_certified:.4f} (not credible)")

cav = concavification_value(instance)
print(f"\nindependent check, concave envelope at the prior: {cav:.6f}")
