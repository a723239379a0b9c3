"""
Walk through one decode of the length-7 Hamming code, step by step.

Shows the preprocessing pipeline (reliability permutation, block
elimination, parity splits), then lets the serial list Viterbi session emit
constrained patterns until the certification check fires.
"""

import numpy as np

from lcosd import (
    BitMatrix,
    DecoderConfig,
    LinearCode,
    SlvaSession,
    frame_from_observations,
    lc_osd,
    preprocess,
    reconstruct,
    soft_weight,
    syndrome,
)

H = BitMatrix.from_dense(
    [
        [1, 0, 1, 0, 1, 0, 1],
        [0, 1, 1, 0, 0, 1, 1],
        [0, 0, 0, 1, 1, 1, 1],
    ]
)
code = LinearCode(7, 4, H)

# A hand-picked received vector: two low-confidence sign flips.
y = np.array([-1.0, 1.5, 2.0, -3.0, 3.5, 5.0, 7.0])
frame = frame_from_observations(y, sigma=1.0, codeword=np.zeros(7, dtype=np.uint8))
print("observations      y =", frame.y)
print("log-likelihoods   r =", frame.r)
print("hard decisions    z =", frame.z)
print("syndrome of z       =", syndrome(H, frame.z))

# Constraint degree delta = n - k turns the search into full maximum
# likelihood served one candidate at a time.
delta = 3
inst = preprocess(code, frame, delta)
print("\npermutation (by reliability):", inst.pi.map)
print("unreliable-zone width:", inst.left_width, " reliable width:", inst.right_width)
print("local constraint matrix:\n", inst.p2.to_dense())
print("target syndrome:", inst.s2)

session = SlvaSession(inst.p2, inst.r_abs_right, inst.s2)
best_weight = soft_weight(frame.z, np.abs(frame.r))
print(f"\nhard-decision pattern weighs {best_weight:.1f}; searching lighter ones:")
for _ in range(4):
    cand = session.next_candidate()
    tep, word = reconstruct(inst, cand.pattern)
    total = soft_weight(tep, np.abs(frame.r))
    print(f"  rank {cand.rank}: partial weight {cand.weight:5.1f}  ->  "
          f"word {word}  total weight {total:5.1f}")

result = lc_osd(code, frame, DecoderConfig(delta=delta, l_max=16, keep_trace=True))
print(f"\ndecoder output: {result.codeword}  weight {result.gamma_opt:.1f}  "
      f"after {result.searches} search(es), stop reason: {result.stop_reason}")
