# %% [markdown]
# # Point and range queries
#
# A point query asks for one key per level. A document matches when it
# shares at least one key with the query.

# %%
from timehash import PoiRecord, TimeRange, build_index, parse_hhmm, point_query_terms, range_query_terms, scope_filter

pois = [
    PoiRecord.from_json('{"id": "cafe", "ranges": [["0730", "1500"]]}'),
    PoiRecord.from_json('{"id": "bistro", "ranges": [["1130", "1430"], ["1730", "2200"]]}'),
    PoiRecord.from_json('{"id": "bar", "ranges": [["1800", "0200"]]}'),
    PoiRecord.from_json('{"id": "store", "ranges": [["0000", "2400"]]}'),
]
idx = build_index(pois)
print("query keys at 14:30:", point_query_terms(parse_hhmm("1430")))

# %%
for hhmm in ("0700", "1429", "1430", "1600", "0130"):
    t = parse_hhmm(hhmm)
    got = idx.point_query(t).doc_ids
    print(hhmm, sorted(got), "matches scan:", got == scope_filter(pois, t))

# %% [markdown]
# Range queries return documents open at any minute of `[t1, t2)`.

# %%
q = TimeRange(parse_hhmm("1500"), parse_hhmm("1730"))
print(len(range_query_terms(q)), "probe keys;", sorted(idx.range_query(q).doc_ids))
