# %% [markdown]
# # Synthetic business hours
#
# Start minutes cluster on the hour and half hour; about 9% of businesses
# close for a break and 6% never close. `duration_mean` is tuned so the
# average business is open about 610 minutes a day.

# %%
import numpy as np

from timehash.datagen import DistributionConfig, calibrate, distribution_report, generate, sample

cfg = calibrate(609.7, DistributionConfig(n=20_000), sample_size=20_000)
print(cfg.to_text())

# %%
s = sample(cfg)
print("open minutes: mean %.1f, quartiles %s" % (s.open_minutes().mean(), np.percentile(s.open_minutes(), [25, 50, 75])))

# %%
rep = distribution_report(generate(cfg))
for k, v in rep.as_dict().items():
    print(f"{k:>24}: {v}")
