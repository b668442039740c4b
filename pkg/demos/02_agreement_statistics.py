"""Walkthrough: recompute the published agreement statistics from the
embedded reference tables.

Run with: python demos/02_agreement_statistics.py
"""

from modelbench import published, stats
from modelbench.scoring import RubricScore, build_label_matrix


def scores_for(rater: str) -> list[RubricScore]:
    kind = "human" if rater in published.HUMAN_RATERS else "llm_judge"
    return [RubricScore(rater_id=rater, rater_kind=kind, dataset_id=ds,
                        scores=dict(published.SCORES[rater][ds]))
            for ds in published.DATASET_ORDER]


all_scores = [s for r in ("grok", "mistral", "A1", "A2") for s in scores_for(r)]

# Binarize the 8 datasets x 5 criteria = 40 cells per rater, then measure
# chance-corrected agreement within each rater group.
matrix = build_label_matrix(all_scores, ["grok", "mistral", "A1", "A2"],
                            dataset_order=published.DATASET_ORDER)
k_llm = stats.cohens_kappa(matrix.column("grok"), matrix.column("mistral"))
k_hum = stats.cohens_kappa(matrix.column("A1"), matrix.column("A2"))
print(f"kappa(grok, mistral)  = {k_llm:.4f}   (published: 0.773)")
print(f"kappa(A1, A2)         = {k_hum:.4f}   (published: 0.684)")

# Cross-group agreement uses OR-rule consensus columns: an item is
# acceptable for a group if either member rated it acceptable.
k_cons = stats.cohens_kappa(matrix.consensus(["grok", "mistral"]),
                            matrix.consensus(["A1", "A2"]))
print(f"kappa(LLMs, humans)   = {k_cons:.4f}   (published: 0.7222)")

# Rank correlation between the two judges, dataset by dataset, with the
# exact one-sided permutation p-value (n = 4 generators -> 24 rankings).
print("\ndataset            rho    p(exact)")
for ds in published.DATASET_ORDER:
    grok = published.RANKINGS[ds]["grok"]
    mistral = published.RANKINGS[ds]["mistral"]
    gens = sorted(grok)
    rho = stats.spearman_rho([grok[g] for g in gens], [mistral[g] for g in gens])
    p = stats.spearman_exact_p(rho, len(gens))
    note = "  <- known deviation (published 0.2)" if ds == "Pacemaker" else ""
    print(f"{ds:<18} {rho:>4.1f}   {p:.4f}{note}")

# Effect sizes between the raters of each group, pooled-SD convention.
print("\ncriterion      LLM d      human d")
for crit in published.CRITERIA:
    llm = stats.cohens_d([published.SCORES["grok"][ds][crit]
                          for ds in published.DATASET_ORDER],
                         [published.SCORES["mistral"][ds][crit]
                          for ds in published.DATASET_ORDER])
    hum = stats.cohens_d([published.SCORES["A1"][ds][crit]
                          for ds in published.DATASET_ORDER],
                         [published.SCORES["A2"][ds][crit]
                          for ds in published.DATASET_ORDER])
    name = published.CRITERION_NAMES[crit]
    print(f"{name:<13} {llm.d:>6.2f} {llm.label:<7} {hum.d:>6.2f} {hum.label}")

# Are the judges' scores significantly above the rubric midpoint of 3?
print("\nexact signed-rank vs midpoint 3 (pooled 16 LLM scores per criterion)")
for crit in published.CRITERIA:
    pooled = [published.SCORES[j][ds][crit] for j in published.LLM_JUDGES
              for ds in published.DATASET_ORDER]
    r = stats.wilcoxon_signed_rank(pooled, mu0=3)
    print(f"{published.CRITERION_NAMES[crit]:<13} W+={r.statistic:>5.1f}  "
          f"one-sided p={r.p_greater:.2e}  ({r.method})")
