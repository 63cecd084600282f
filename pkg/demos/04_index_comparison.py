# %% [markdown]
# # Index size and accuracy
#
# Minute terms are exact but large; hour terms are small but match places
# that close at :30. Hierarchical keys are both small and exact.

# %%
from timehash import bench
from timehash.datagen import DistributionConfig, generate

pois = generate(DistributionConfig(n=10_000))
print(bench.index_size_comparison(pois, queries=bench.sample_queries(50)))

# %% [markdown]
# Latency in microseconds. The scan baseline checks every document.

# %%
print(bench.end_to_end(pois, n_queries=200, n_accuracy=20))
