"""Cold versus hot queries through the memoization cache.

A repeated (query, k, mode) triple is served straight from the cache: no
descent, no collection, zero scan work, and a bit-identical result object.
"""

import time

from lcpsearch import QueryCache, build, generate_dataset, generate_queries, memoized_query

dataset = generate_dataset(1_000_000, 16, 4, seed=55)
index = build(dataset)
queries = generate_queries(dataset, 500, seed=56, prefix_len=8)
cache = QueryCache()

cold_work = index.new_work_report()
t0 = time.perf_counter()
cold = [memoized_query(index, q, 10, "complete", cache, work=cold_work) for q in queries]
cold_s = time.perf_counter() - t0

hot_work = index.new_work_report()
t1 = time.perf_counter()
hot = [memoized_query(index, q, 10, "complete", cache, work=hot_work) for q in queries]
hot_s = time.perf_counter() - t1

print(f"cold: {cold_s * 1e3:7.1f} ms  ({cold_work.symbols_compared} symbol comparisons)")
print(f"hot:  {hot_s * 1e3:7.1f} ms  ({hot_work.symbols_compared} symbol comparisons, "
      f"{hot_work.cache_hits} cache hits)")
print(f"speedup: {cold_s / hot_s:.0f}x")

assert all(a.to_bytes() == b.to_bytes() for a, b in zip(cold, hot))
print("hot results are byte-identical to cold results")
