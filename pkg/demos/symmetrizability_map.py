"""Where can the jammer impersonate the encoder?

For the bit-flip channel the answer is exact: the weight-w input law is
symmetrizable iff w <= p.  The LP feasibility check rediscovers that
boundary, returning an explicit impersonation map U(s|x) whenever one
exists.
"""

import numpy as np

from winavc import Channel, ConstraintSet, Distribution, ecn_symmetrizable

xor = Channel.xor()

ws = np.round(np.linspace(0.05, 0.45, 9), 3)
ps = np.round(np.linspace(0.05, 0.45, 9), 3)

print("rows: input weight w, cols: state budget p;  S = symmetrizable")
print("      " + " ".join(f"{p:5.2f}" for p in ps))
for w in ws:
    cells = []
    for p in ps:
        res = ecn_symmetrizable(
            Distribution.bernoulli(w), xor, ConstraintSet.weight_cap(p)
        )
        cells.append("  S  " if res.feasible else "  .  ")
    print(f"{w:5.2f} " + " ".join(c.strip().center(5) for c in cells))

print()
print("closed form: symmetrizable iff w <= p (the staircase above)")

# A witness is a recipe the jammer can actually execute: draw a fake
# codeword x', then flip each state symbol according to U(.|x').
res = ecn_symmetrizable(
    Distribution.bernoulli(0.1), xor, ConstraintSet.weight_cap(0.2)
)
print()
print("witness at (w=0.1, p=0.2):")
print("  U(s|x=0) =", np.round(res.witness[0].probs, 6))
print("  U(s|x=1) =", np.round(res.witness[1].probs, 6))
print("  induced state marginal:", np.round(res.marginal.probs, 6))
print("  equality residual:", res.residual)
