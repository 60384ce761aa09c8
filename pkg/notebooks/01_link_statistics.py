# ---
# jupyter:
#   jupytext:
#     formats: py:percent
# ---

# %% [markdown]
# # Per-hop link statistics
#
# Each hop carries an FSO link under negative-exponential turbulence and an RF
# link under Rayleigh fading. Here we draw channel samples and compare their
# empirical CDFs with the closed forms.

# %%
import numpy as np

from hybrid_relay import LinkParams
from hybrid_relay.analytics import cdf_snr_fso, cdf_snr_rf
from hybrid_relay.simulator import block_generator, hop_snr, sample_channel

params = LinkParams(lam=1.0, gamma_bar_fso=10.0, gamma_bar_rf=10.0, hops=1)
snr = hop_snr(sample_channel(params, 200_000, block_generator(1, 0)), params)

# %%
print(f"{'gamma':>8} {'FSO emp':>9} {'FSO cdf':>9} {'RF emp':>9} {'RF cdf':>9}")
for g in (0.1, 1.0, 5.0, 10.0, 30.0, 100.0):
    print(
        f"{g:8.1f} {np.mean(snr.gamma_fso <= g):9.4f} {cdf_snr_fso(g, 1.0, 10.0):9.4f}"
        f" {np.mean(snr.gamma_rf <= g):9.4f} {cdf_snr_rf(g, 10.0):9.4f}"
    )

# %% [markdown]
# The FSO CDF rises like the square root of the SNR near zero, so deep fades
# are much likelier on the optical link than on the RF link at equal average
# SNR. Stronger turbulence (larger lambda) makes that worse.

# %%
for lam in (0.5, 1.0, 2.0, 5.0):
    print(f"lambda={lam}: P(gamma_fso < 1) = {cdf_snr_fso(1.0, lam, 10.0):.4f}")
