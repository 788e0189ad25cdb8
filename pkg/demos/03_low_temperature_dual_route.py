# Exact samples below the critical temperature via the dual lattice.
#
# Direct CFTP is hopeless here: the chains sit in opposite phases for an
# exponentially long time. Instead run CFTP on G_{L-1} with plus boundary
# at the dual temperature (which is above critical), pin the outer face to
# +1, draw bonds on the dual, take the complementary primal bonds and give
# each primal cluster a fair coin.

import numpy as np

from exact_ising import (KeyedStream, RandomnessSchedule, SamplerConfig, beta_to_p, build_dual,
                         build_square_lattice, cftp_sample, describe, dual_beta, dual_rc_state,
                         ising_to_rc, rc_to_ising, sample_ising)

L, beta, seed = 24, 1.4, 7
print(describe(beta))

inner = build_square_lattice(L - 1)
G_dual, dual_map = build_dual(L)
bstar = dual_beta(beta)

tilde = cftp_sample(inner, bstar, "plus", RandomnessSchedule(seed, inner.vertex_count))
print(f"CFTP on G_{L - 1} at beta*={bstar:.4f}: {tilde.epochs_used} epochs, "
      f"{tilde.total_updates} updates")

sigma_star = np.append(tilde.sample, np.int8(1))
omega_star = ising_to_rc(G_dual, sigma_star, beta_to_p(bstar), KeyedStream(seed, 1))
omega = dual_rc_state(omega_star, dual_map.inverse())
sigma = rc_to_ising(build_square_lattice(L), omega, KeyedStream(seed, 2))

# The packaged sampler does exactly these steps with the same sub-streams.
assert np.array_equal(sigma, sample_ising(SamplerConfig(L, beta, seed)))

for row in sigma.reshape(L, L):
    print("".join("#" if s > 0 else "." for s in row))
print("magnetisation per site:", sigma.mean())
