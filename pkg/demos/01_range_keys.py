# %% [markdown]
# # Range keys
#
# A business open 11:40-21:00 gets five keys instead of 560 minute terms.
# Each key names one aligned block; longer keys are finer blocks.

# %%
from timehash import DEFAULT_HIERARCHY, TimeRange, boundary_constant, decode, format_hhmm, index_terms, max_key_bound, parse_hhmm

r = TimeRange(parse_hhmm("1140"), parse_hhmm("2100"))
for key in sorted(index_terms(r), key=len):
    block = decode(key)
    print(f"{key:>10}  {format_hhmm(block.start)}-{format_hhmm(block.end)}  ({len(block)} min)")

# %% [markdown]
# Blocks tile the range exactly: no gaps, no overlap.

# %%
print(sum(len(decode(k)) for k in index_terms(r)) == len(r))

# %% [markdown]
# The key count is bounded by a constant that depends only on the hierarchy.

# %%
print("B =", boundary_constant(DEFAULT_HIERARCHY), " bound =", max_key_bound(DEFAULT_HIERARCHY))
worst = max(((s, e) for s in range(0, 1440, 7) for e in range(s + 1, 1441, 11)), key=lambda p: len(index_terms(TimeRange(*p))))
print("worst sampled range:", format_hhmm(worst[0]), format_hhmm(worst[1]), len(index_terms(TimeRange(*worst))), "keys")
