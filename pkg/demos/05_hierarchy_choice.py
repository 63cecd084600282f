# %% [markdown]
# # Choosing a hierarchy
#
# Exhaustive key counts over every range of the day, then total terms on
# synthetic data for a few candidate hierarchies.

# %%
from timehash import bench
from timehash.datagen import DistributionConfig, generate

for b in bench.enumerate_key_stats().values():
    print(f"{b.label:>7}: avg {b.avg:5.2f}  min {b.min:2d}  max {b.max:2d}  (minute terms {b.naive_avg:6.1f})")

# %%
print(bench.ablation())

# %%
print(bench.hierarchy_sweep(generate(DistributionConfig(n=20_000))))
